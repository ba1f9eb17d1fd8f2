import { describe, expect, it } from 'vitest';

import { applyDelta, applyDeltas, UnknownTarget } from '../src/drafts';
import { fixtureGraph } from './helpers';

describe('draft deltas', () => {
  it('never mutates the source document', () => {
    const doc = fixtureGraph('base');
    const frozen = JSON.stringify(doc);
    const next = applyDeltas(doc, [
      { kind: 'set_preposition', child: 'chair_1', parent: 'table_1', preposition: 'right_of' },
      { kind: 'set_adjacency', child: 'chair_1', parent: 'table_1', adjacency: 'not_adjacent' },
      { kind: 'set_facing', id: 'chair_1', facing: 'west_wall' },
    ]);
    expect(JSON.stringify(doc)).toBe(frozen);
    const chair = next.objects.find((o) => o.new_object_id === 'chair_1')!;
    expect(chair.scene_graph[0].preposition).toBe('right_of');
    expect(chair.scene_graph[0].adjacency).toBe('not_adjacent');
    expect(chair.facing).toBe('west_wall');
  });

  it('adds, retargets, and removes edges', () => {
    const doc = fixtureGraph('base');
    let next = applyDelta(doc, {
      kind: 'add_edge',
      child: 'lamp_1',
      parent: 'wall_north',
      preposition: 'on',
      adjacency: 'adjacent',
    });
    expect(next.objects[2].scene_graph).toHaveLength(2);
    next = applyDelta(next, {
      kind: 'retarget_edge',
      child: 'lamp_1',
      parent: 'wall_north',
      newParent: 'floor',
    });
    expect(next.objects[2].scene_graph[1].parent_id).toBe('floor');
    next = applyDelta(next, { kind: 'remove_edge', child: 'lamp_1', parent: 'floor' });
    expect(next.objects[2].scene_graph).toHaveLength(1);
  });

  it('rejects edits against missing objects or edges', () => {
    const doc = fixtureGraph('base');
    expect(() =>
      applyDelta(doc, { kind: 'set_facing', id: 'sofa_9', facing: 'north_wall' }),
    ).toThrow(UnknownTarget);
    expect(() =>
      applyDelta(doc, { kind: 'remove_edge', child: 'chair_1', parent: 'floor' }),
    ).toThrow(UnknownTarget);
  });
});
