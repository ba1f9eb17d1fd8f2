/**
 * Client-side scene-graph validation.
 *
 * Mirrors the service's validator rule for rule, including message wording,
 * so a draft that passes here is accepted by the server and an illegal edit
 * is blocked with the same explanation the server would give.
 */

import type { GraphDocument, GraphObjectEntry } from './types';
import {
  ADJACENCIES,
  FACINGS,
  LAYOUT_NODE_IDS,
  LAYOUT_PREPOSITIONS,
  OBJECT_PREPOSITIONS,
  isLayoutNode,
} from './types';

export interface ValidationError {
  code: string;
  subject: string;
  message: string;
}

// Python-style repr for strings embedded in validator messages.
function repr(value: string): string {
  return `'${value}'`;
}

function sizes(entry: GraphObjectEntry): [number, number, number] {
  const s = entry.size_in_meters;
  return [s.Length, s.Width, s.Height];
}

export function validateGraph(doc: GraphDocument): ValidationError[] {
  const errors: ValidationError[] = [];
  const add = (code: string, subject: string, message: string) =>
    errors.push({ code, subject, message });

  const seen = new Set<string>();
  for (const entry of doc.objects) {
    const id = entry.new_object_id;
    if (seen.has(id)) {
      add('DuplicateId', id, `duplicate node id ${repr(id)}`);
    }
    seen.add(id);
    if (isLayoutNode(id)) {
      add('ReservedId', id, `${repr(id)} is a reserved layout node id`);
    }
    const dims = sizes(entry);
    if (dims.some((s) => s <= 0)) {
      add('NonPositiveSize', id, `${repr(id)} has non-positive size (${dims.join(', ')})`);
    }
    if (!FACINGS.includes(entry.facing)) {
      add('InvalidRotation', id, `${repr(id)} facing ${repr(entry.facing)} not cardinal`);
    }
  }

  const known = new Set<string>([...seen, ...LAYOUT_NODE_IDS]);
  for (const entry of doc.objects) {
    const child = entry.new_object_id;
    for (const edge of entry.scene_graph) {
      const label = `${edge.parent_id}->${child}`;
      if (edge.parent_id === child) {
        add('SelfEdge', label, `edge ${label} has identical endpoints`);
      }
      if (!known.has(edge.parent_id)) {
        add('UnknownNode', label, `edge ${label} references unknown node ${repr(edge.parent_id)}`);
      }
      if (isLayoutNode(edge.parent_id)) {
        if (!LAYOUT_PREPOSITIONS.includes(edge.preposition)) {
          add(
            'InvalidLayoutPreposition',
            label,
            `layout edge ${label} uses ${repr(edge.preposition)}; allowed: on, in_the_corner`,
          );
        }
      } else if (!OBJECT_PREPOSITIONS.includes(edge.preposition)) {
        add('InvalidObjectPreposition', label, `object edge ${label} uses ${repr(edge.preposition)}`);
      }
      if (!ADJACENCIES.includes(edge.adjacency)) {
        add('InvalidAdjacency', label, `edge ${label} adjacency ${repr(edge.adjacency)}`);
      }
    }
  }

  const cycle = findCycle(doc);
  if (cycle.length) {
    const members = [...new Set(cycle)].sort().join(', ');
    add('CycleDetected', members, `cycle through {${members}}`);
  }
  return errors;
}

/** Node ids on one cycle among object nodes, or [] if acyclic. */
export function findCycle(doc: GraphDocument): string[] {
  const adjacency = new Map<string, string[]>();
  for (const entry of doc.objects) {
    for (const edge of entry.scene_graph) {
      if (isLayoutNode(edge.parent_id)) continue;
      const out = adjacency.get(edge.parent_id) ?? [];
      out.push(entry.new_object_id);
      adjacency.set(edge.parent_id, out);
    }
  }

  const color = new Map<string, 'gray' | 'black'>();
  const stack: string[] = [];

  function visit(u: string): string[] {
    color.set(u, 'gray');
    stack.push(u);
    for (const v of [...(adjacency.get(u) ?? [])].sort()) {
      const state = color.get(v);
      if (state === 'gray') {
        return stack.slice(stack.indexOf(v));
      }
      if (state === undefined) {
        const found = visit(v);
        if (found.length) return found;
      }
    }
    stack.pop();
    color.set(u, 'black');
    return [];
  }

  for (const start of [...adjacency.keys()].sort()) {
    if (!color.has(start)) {
      const found = visit(start);
      if (found.length) return found;
    }
  }
  return [];
}
