/** Shared test helpers: fixture loading and a fixture-backed fake service. */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import type { FetchLike } from '../src/client';
import type { GraphDocument, Manifest } from '../src/types';

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), 'fixtures');

export function fixtureText(variant: string, file: string): string {
  return readFileSync(join(FIXTURES, variant, file), 'utf8');
}

export function fixtureJson<T>(variant: string, file: string): T {
  return JSON.parse(fixtureText(variant, file)) as T;
}

export function fixtureGraph(variant: string): GraphDocument {
  return fixtureJson<GraphDocument>(variant, 'graph.json');
}

export function fixtureManifest(variant: string): Manifest {
  return fixtureJson<Manifest>(variant, 'manifest.json');
}

export interface FakeService {
  fetch: FetchLike;
  /** Which fixture variant artifact GETs currently serve. */
  current: string;
  /** Every request as "METHOD path". */
  log: string[];
  /** Bodies of replay POSTs, in order. */
  replays: Array<{ stage: string; overrides: Record<string, unknown> }>;
}

/**
 * Fake design service backed by the fixture directories. A replay whose
 * draft graph gives chair_1 a right_of edge switches the served variant to
 * "edited", mimicking a real re-solve of the edited graph.
 */
export function makeFakeService(designId = 'd1'): FakeService {
  const service: FakeService = { current: 'base', log: [], replays: [], fetch: undefined! };

  const json = (body: unknown, status = 200) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { 'content-type': 'application/json' },
    });

  service.fetch = async (url: string, init?: RequestInit) => {
    const path = new URL(url, 'http://service.test').pathname;
    service.log.push(`${init?.method ?? 'GET'} ${path}`);

    if (path === `/designs/${designId}/replay` && init?.method === 'POST') {
      const body = JSON.parse(String(init.body)) as {
        stage: string;
        overrides: Record<string, unknown>;
      };
      service.replays.push(body);
      const graph = body.overrides.graph as GraphDocument | undefined;
      if (graph) {
        const chair = graph.objects.find((o) => o.new_object_id === 'chair_1');
        if (chair?.scene_graph.some((e) => e.preposition === 'right_of')) {
          service.current = 'edited';
        }
      }
      return json({ version: 'v002', index: {} });
    }
    if (path === `/designs/${designId}/graph`) {
      return json(fixtureJson(service.current, 'graph.json'));
    }
    if (path === `/designs/${designId}/manifest`) {
      return json(fixtureJson(service.current, 'manifest.json'));
    }
    if (path === `/designs/${designId}/floorplan`) {
      return new Response(fixtureText(service.current, 'floorplan.svg'), {
        status: 200,
        headers: { 'content-type': 'image/svg+xml' },
      });
    }
    if (path === `/designs/${designId}`) {
      return json({ status: 'solved', error: null, version: 'v001', index: {} });
    }
    return json({ detail: 'not found' }, 404);
  };

  return service;
}
