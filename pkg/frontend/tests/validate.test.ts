import { describe, expect, it } from 'vitest';

import type { GraphDocument } from '../src/types';
import { findCycle, validateGraph } from '../src/validate';
import { fixtureGraph } from './helpers';

function graphWith(mutate: (doc: GraphDocument) => void): GraphDocument {
  const doc = fixtureGraph('base');
  mutate(doc);
  return doc;
}

describe('validateGraph', () => {
  it('accepts the fixture graph', () => {
    expect(validateGraph(fixtureGraph('base'))).toEqual([]);
  });

  it('blocks a wall parent with left_of using the vocabulary rule message', () => {
    const doc = graphWith((d) => {
      d.objects[1].scene_graph[0].parent_id = 'wall_east';
    });
    const errors = validateGraph(doc);
    expect(errors).toHaveLength(1);
    expect(errors[0].code).toBe('InvalidLayoutPreposition');
    expect(errors[0].message).toBe(
      "layout edge wall_east->chair_1 uses 'left_of'; allowed: on, in_the_corner",
    );
  });

  it('flags in_the_corner between two objects', () => {
    const doc = graphWith((d) => {
      d.objects[1].scene_graph[0].preposition = 'in_the_corner';
    });
    expect(validateGraph(doc).map((e) => e.code)).toEqual(['InvalidObjectPreposition']);
  });

  it('flags duplicate, reserved, and unknown ids', () => {
    const doc = graphWith((d) => {
      d.objects[1].new_object_id = 'table_1';
      d.objects[2].new_object_id = 'floor';
      d.objects[0].scene_graph[0].parent_id = 'sofa_9';
    });
    const codes = validateGraph(doc).map((e) => e.code);
    expect(codes).toContain('DuplicateId');
    expect(codes).toContain('ReservedId');
    expect(codes).toContain('UnknownNode');
  });

  it('flags self edges, bad adjacency, and non-positive sizes', () => {
    const doc = graphWith((d) => {
      d.objects[1].scene_graph[0].parent_id = 'chair_1';
      d.objects[2].scene_graph[0].adjacency = 'touching' as never;
      d.objects[0].size_in_meters.Height = 0;
    });
    const codes = validateGraph(doc).map((e) => e.code);
    expect(codes).toContain('SelfEdge');
    expect(codes).toContain('InvalidAdjacency');
    expect(codes).toContain('NonPositiveSize');
  });

  it('detects cycles through object nodes', () => {
    const doc = graphWith((d) => {
      d.objects[0].scene_graph.push({
        parent_id: 'chair_1',
        preposition: 'right_of',
        adjacency: 'not_adjacent',
      });
    });
    expect(findCycle(doc).sort()).toEqual(['chair_1', 'table_1']);
    const cycle = validateGraph(doc).find((e) => e.code === 'CycleDetected');
    expect(cycle?.message).toBe('cycle through {chair_1, table_1}');
  });
});
