/**
 * Design service API client: submit jobs, poll with backoff, fetch bundle
 * artifacts, and replay stages. Consumes the HTTP API exclusively.
 */

import type {
  AssetHit,
  DesignJob,
  DesignRequest,
  GraphDocument,
  JobStatus,
  Manifest,
  ReplayResult,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface PollOptions {
  /** First wait in ms; each retry multiplies by `factor` up to `maxIntervalMs`. */
  intervalMs?: number;
  factor?: number;
  maxIntervalMs?: number;
  /** Give up after this many polls. */
  maxPolls?: number;
  onUpdate?: (job: DesignJob) => void;
  sleep?: (ms: number) => Promise<void>;
}

const TERMINAL: readonly JobStatus[] = ['solved', 'unsat', 'failed'];

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly url: string,
    message: string,
  ) {
    super(message);
  }
}

export class JobFailed extends Error {
  constructor(readonly job: DesignJob) {
    super(job.error ?? 'design job failed');
  }
}

export class PollTimeout extends Error {}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class DesignClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const url = `${this.baseUrl}${path}`;
    const response = await this.fetchImpl(url, init);
    if (!response.ok) {
      throw new ApiError(response.status, url, `${init?.method ?? 'GET'} ${path}: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  private async requestText(path: string): Promise<string> {
    const url = `${this.baseUrl}${path}`;
    const response = await this.fetchImpl(url);
    if (!response.ok) {
      throw new ApiError(response.status, url, `GET ${path}: ${response.status}`);
    }
    return response.text();
  }

  async createDesign(request: DesignRequest): Promise<string> {
    const body = await this.request<{ job_id: string }>('/designs', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(request),
    });
    return body.job_id;
  }

  getDesign(jobId: string): Promise<DesignJob> {
    return this.request<DesignJob>(`/designs/${jobId}`);
  }

  getGraph(jobId: string): Promise<GraphDocument> {
    return this.request<GraphDocument>(`/designs/${jobId}/graph`);
  }

  getManifest(jobId: string): Promise<Manifest> {
    return this.request<Manifest>(`/designs/${jobId}/manifest`);
  }

  getLayout(jobId: string): Promise<Record<string, unknown>> {
    return this.request<Record<string, unknown>>(`/designs/${jobId}/layout`);
  }

  getFloorplan(jobId: string): Promise<string> {
    return this.requestText(`/designs/${jobId}/floorplan`);
  }

  replay(
    jobId: string,
    stage: string,
    overrides: Record<string, unknown>,
  ): Promise<ReplayResult> {
    return this.request<ReplayResult>(`/designs/${jobId}/replay`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ stage, overrides }),
    });
  }

  searchAssets(query: string, k: number): Promise<{ results: AssetHit[] }> {
    const params = new URLSearchParams({ q: query, k: String(k) });
    return this.request<{ results: AssetHit[] }>(`/assets/search?${params}`);
  }

  /** Poll a job until it reaches a terminal state; throws JobFailed on failure. */
  async pollUntilDone(jobId: string, options: PollOptions = {}): Promise<DesignJob> {
    const {
      intervalMs = 500,
      factor = 1.5,
      maxIntervalMs = 5000,
      maxPolls = 120,
      onUpdate,
      sleep = defaultSleep,
    } = options;
    let wait = intervalMs;
    for (let i = 0; i < maxPolls; i += 1) {
      const job = await this.getDesign(jobId);
      onUpdate?.(job);
      if (job.status === 'failed') throw new JobFailed(job);
      if (TERMINAL.includes(job.status)) return job;
      await sleep(wait);
      wait = Math.min(wait * factor, maxIntervalMs);
    }
    throw new PollTimeout(`job ${jobId} still running after ${maxPolls} polls`);
  }
}
