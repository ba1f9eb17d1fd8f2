/**
 * Draft edits over a fetched scene-graph document.
 *
 * Deltas are plain data; applying them always deep-clones the source
 * document, so fetched artifacts are never mutated and a draft can be
 * discarded by dropping the delta list.
 */

import type { Adjacency, Facing, GraphDocument, Preposition } from './types';

export type GraphDelta =
  | { kind: 'set_preposition'; child: string; parent: string; preposition: Preposition }
  | { kind: 'set_adjacency'; child: string; parent: string; adjacency: Adjacency }
  | { kind: 'retarget_edge'; child: string; parent: string; newParent: string }
  | {
      kind: 'add_edge';
      child: string;
      parent: string;
      preposition: Preposition;
      adjacency: Adjacency;
    }
  | { kind: 'remove_edge'; child: string; parent: string }
  | { kind: 'set_facing'; id: string; facing: Facing };

export class UnknownTarget extends Error {}

function clone(doc: GraphDocument): GraphDocument {
  return JSON.parse(JSON.stringify(doc)) as GraphDocument;
}

function entryOf(doc: GraphDocument, id: string) {
  const entry = doc.objects.find((o) => o.new_object_id === id);
  if (!entry) throw new UnknownTarget(`no object ${id}`);
  return entry;
}

function edgeOf(doc: GraphDocument, child: string, parent: string) {
  const edge = entryOf(doc, child).scene_graph.find((e) => e.parent_id === parent);
  if (!edge) throw new UnknownTarget(`no edge ${parent}->${child}`);
  return edge;
}

export function applyDelta(doc: GraphDocument, delta: GraphDelta): GraphDocument {
  const next = clone(doc);
  switch (delta.kind) {
    case 'set_preposition':
      edgeOf(next, delta.child, delta.parent).preposition = delta.preposition;
      break;
    case 'set_adjacency':
      edgeOf(next, delta.child, delta.parent).adjacency = delta.adjacency;
      break;
    case 'retarget_edge':
      edgeOf(next, delta.child, delta.parent).parent_id = delta.newParent;
      break;
    case 'add_edge':
      entryOf(next, delta.child).scene_graph.push({
        parent_id: delta.parent,
        preposition: delta.preposition,
        adjacency: delta.adjacency,
      });
      break;
    case 'remove_edge': {
      const entry = entryOf(next, delta.child);
      const index = entry.scene_graph.findIndex((e) => e.parent_id === delta.parent);
      if (index < 0) throw new UnknownTarget(`no edge ${delta.parent}->${delta.child}`);
      entry.scene_graph.splice(index, 1);
      break;
    }
    case 'set_facing':
      entryOf(next, delta.id).facing = delta.facing;
      break;
  }
  return next;
}

export function applyDeltas(doc: GraphDocument, deltas: readonly GraphDelta[]): GraphDocument {
  return deltas.reduce(applyDelta, clone(doc));
}
