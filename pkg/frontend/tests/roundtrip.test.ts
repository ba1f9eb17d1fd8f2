import { describe, expect, it } from 'vitest';

import { DesignClient } from '../src/client';
import { objectRect, parseSvgRects } from '../src/plan';
import { ReplayInFlight, UiSession } from '../src/session';
import { fixtureText, makeFakeService } from './helpers';

async function loadSession() {
  const service = makeFakeService();
  const session = await UiSession.load(new DesignClient('http://svc', service.fetch), 'd1');
  return { service, session };
}

describe('replay round trip', () => {
  it('flipping left_of to right_of mirrors the chair to the re-solved position', async () => {
    const { service, session } = await loadSession();
    const table = session.manifest.objects.find((o) => o.id === 'table_1')!;
    const chairBefore = objectRect(
      session.manifest.objects.find((o) => o.id === 'chair_1')!,
      session.manifest.room,
    );

    const errors = session.edit({
      kind: 'set_preposition',
      child: 'chair_1',
      parent: 'table_1',
      preposition: 'right_of',
    });
    expect(errors).toEqual([]);
    await session.submitReplay('solve_layout', { seed: 7 });

    expect(service.replays).toHaveLength(1);
    expect(service.replays[0].stage).toBe('solve_layout');
    const chairAfterObj = session.manifest.objects.find((o) => o.id === 'chair_1')!;
    const chairAfter = objectRect(chairAfterObj, session.manifest.room);

    // The fixture under edited/ is a direct CLI solve of the edited graph,
    // so this compares the displayed rectangle to that run.
    const solved = parseSvgRects(fixtureText('edited', 'floorplan.svg')).get('chair_1')!;
    expect(Math.abs(chairAfter.x - solved.x)).toBeLessThan(1);
    expect(Math.abs(chairAfter.y - solved.y)).toBeLessThan(1);
    expect(Math.abs(chairAfter.width - solved.width)).toBeLessThan(1);
    expect(Math.abs(chairAfter.height - solved.height)).toBeLessThan(1);

    // Mirrored across the table: was west of it, now east of it.
    const tableAfter = objectRect(
      session.manifest.objects.find((o) => o.id === 'table_1')!,
      session.manifest.room,
    );
    expect(chairBefore.x + chairBefore.width).toBeLessThanOrEqual(
      objectRect(table, session.manifest.room).x + 1e-9,
    );
    expect(chairAfter.x).toBeGreaterThanOrEqual(tableAfter.x + tableAfter.width - 1e-9);

    expect(session.movedSinceLastReplay.map((m) => m.id)).toContain('chair_1');
    expect(session.pendingDeltas).toHaveLength(0);
  });

  it('no-edit replay leaves the plan pixels unchanged', async () => {
    const { session } = await loadSession();
    const before = session.floorplan;
    await session.submitReplay('solve_layout', { seed: 7 });
    expect(session.floorplan).toBe(before);
    expect(session.movedSinceLastReplay).toEqual([]);
  });

  it('blocks an illegal edit with the vocabulary rule message', async () => {
    const { session } = await loadSession();
    const errors = session.edit({
      kind: 'retarget_edge',
      child: 'chair_1',
      parent: 'table_1',
      newParent: 'wall_east',
    });
    expect(errors.map((e) => e.message)).toEqual([
      "layout edge wall_east->chair_1 uses 'left_of'; allowed: on, in_the_corner",
    ]);
    expect(session.pendingDeltas).toHaveLength(0);
    // The fetched graph was not touched by the rejected edit.
    expect(session.graph.objects[1].scene_graph[0].parent_id).toBe('table_1');
  });

  it('rejects edits that would create a cycle', async () => {
    const { session } = await loadSession();
    const errors = session.edit({
      kind: 'add_edge',
      child: 'table_1',
      parent: 'chair_1',
      preposition: 'right_of',
      adjacency: 'not_adjacent',
    });
    expect(errors.map((e) => e.code)).toEqual(['CycleDetected']);
    expect(session.pendingDeltas).toHaveLength(0);
  });

  it('allows only one replay in flight', async () => {
    const { session } = await loadSession();
    const first = session.submitReplay('solve_layout', { seed: 7 });
    await expect(session.submitReplay()).rejects.toThrow(ReplayInFlight);
    await first;
    await expect(session.submitReplay()).resolves.toBeTruthy();
  });
});
