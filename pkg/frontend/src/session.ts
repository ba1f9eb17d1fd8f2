/**
 * UI session state for the human-in-the-loop workflow.
 *
 * Everything shown derives from fetched bundle artifacts plus local draft
 * deltas; fetched artifacts are frozen and never mutated. A replay submits
 * the draft graph as an override, refetches, and reports which objects moved.
 */

import type { DesignClient, PollOptions } from './client';
import type { GraphDelta } from './drafts';
import { applyDeltas } from './drafts';
import type { MovedObject } from './plan';
import { diffMovedObjects } from './plan';
import type { ViewState } from './render';
import type { GraphDocument, Manifest, ReplayResult } from './types';
import type { ValidationError } from './validate';
import { validateGraph } from './validate';

export interface SessionArtifacts {
  graph: GraphDocument;
  manifest: Manifest;
  floorplan: string;
}

export class DraftInvalid extends Error {
  constructor(readonly errors: ValidationError[]) {
    super(errors.map((e) => e.message).join('; '));
  }
}

export class ReplayInFlight extends Error {}

function deepFreeze<T>(value: T): T {
  if (value && typeof value === 'object') {
    Object.freeze(value);
    for (const key of Object.keys(value as object)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
  }
  return value;
}

export class UiSession {
  readonly view: ViewState = { selectedId: null, zoom: 1 };
  private drafts: GraphDelta[] = [];
  private artifacts: SessionArtifacts;
  private replaying = false;
  private lastDiff: MovedObject[] = [];

  private constructor(
    private readonly client: DesignClient,
    readonly designId: string,
    artifacts: SessionArtifacts,
  ) {
    this.artifacts = deepFreeze(artifacts);
  }

  /** Fetch a finished design's artifacts and open a session on them. */
  static async load(client: DesignClient, designId: string): Promise<UiSession> {
    const [graph, manifest, floorplan] = await Promise.all([
      client.getGraph(designId),
      client.getManifest(designId),
      client.getFloorplan(designId),
    ]);
    return new UiSession(client, designId, { graph, manifest, floorplan });
  }

  /** Submit a new design request, poll to completion, then load it. */
  static async create(
    client: DesignClient,
    request: Parameters<DesignClient['createDesign']>[0],
    poll: PollOptions = {},
  ): Promise<UiSession> {
    const jobId = await client.createDesign(request);
    await client.pollUntilDone(jobId, poll);
    return UiSession.load(client, jobId);
  }

  get graph(): GraphDocument {
    return this.artifacts.graph;
  }

  get manifest(): Manifest {
    return this.artifacts.manifest;
  }

  get floorplan(): string {
    return this.artifacts.floorplan;
  }

  get pendingDeltas(): readonly GraphDelta[] {
    return this.drafts;
  }

  get movedSinceLastReplay(): readonly MovedObject[] {
    return this.lastDiff;
  }

  /** The fetched graph with all draft deltas applied. */
  draftGraph(): GraphDocument {
    return applyDeltas(this.artifacts.graph, this.drafts);
  }

  /**
   * Stage one edit. Returns [] and records the delta when the resulting
   * draft is valid; otherwise returns the blocking errors and stages nothing.
   */
  edit(delta: GraphDelta): ValidationError[] {
    const errors = validateGraph(applyDeltas(this.artifacts.graph, [...this.drafts, delta]));
    if (errors.length === 0) {
      this.drafts.push(delta);
    }
    return errors;
  }

  discardDrafts(): void {
    this.drafts = [];
  }

  /**
   * Replay a stage with the draft graph (and any extra overrides), then
   * refetch artifacts and compute the moved-object diff. One replay may be
   * in flight at a time.
   */
  async submitReplay(
    stage = 'solve_layout',
    overrides: Record<string, unknown> = {},
  ): Promise<ReplayResult> {
    if (this.replaying) throw new ReplayInFlight('a replay is already in flight');
    const draft = this.draftGraph();
    const errors = validateGraph(draft);
    if (errors.length) throw new DraftInvalid(errors);

    this.replaying = true;
    try {
      const payload = this.drafts.length ? { graph: draft, ...overrides } : { ...overrides };
      const result = await this.client.replay(this.designId, stage, payload);
      const previous = this.artifacts.manifest;
      const [graph, manifest, floorplan] = await Promise.all([
        this.client.getGraph(this.designId),
        this.client.getManifest(this.designId),
        this.client.getFloorplan(this.designId),
      ]);
      this.artifacts = deepFreeze({ graph, manifest, floorplan });
      this.lastDiff = diffMovedObjects(previous, manifest);
      this.drafts = [];
      return result;
    } finally {
      this.replaying = false;
    }
  }
}
