/**
 * Wire types for the design service HTTP API and bundle artifacts.
 * Field names match the JSON documents the service returns verbatim.
 */

export interface RoomDimensions {
  width_x: number;
  depth_y: number;
  height_z: number;
}

export type Preposition =
  | 'on'
  | 'left_of'
  | 'right_of'
  | 'in_front'
  | 'behind'
  | 'under'
  | 'above'
  | 'in_the_corner';

export type Adjacency = 'adjacent' | 'not_adjacent';

export type Facing = 'north_wall' | 'east_wall' | 'south_wall' | 'west_wall';

export interface GraphEdgeEntry {
  parent_id: string;
  preposition: Preposition;
  adjacency: Adjacency;
}

export interface GraphObjectEntry {
  new_object_id: string;
  style_and_material: string;
  size_in_meters: { Length: number; Width: number; Height: number };
  scene_graph: GraphEdgeEntry[];
  facing: Facing;
}

export interface GraphDocument {
  room_dimensions: RoomDimensions;
  objects: GraphObjectEntry[];
}

export interface ManifestObject {
  id: string;
  name: string;
  asset_id: string;
  position: [number, number, number];
  rotation: number;
  scale: [number, number, number];
  bbox: [number, number, number];
}

export interface Manifest {
  room: RoomDimensions;
  objects: ManifestObject[];
  metadata: { seed: number; config_hash: string; created_at?: string };
}

export type JobStatus = 'pending' | 'running' | 'solved' | 'unsat' | 'failed';

export interface DesignJob {
  status: JobStatus;
  error: string | null;
  version?: string;
  index?: Record<string, string>;
}

export interface ReplayResult {
  version: string;
  index: Record<string, string>;
}

export interface DesignRequest {
  prompt: string;
  room: RoomDimensions;
  object_count?: number;
  seed?: number;
}

export interface AssetHit {
  asset_id: string;
  score: number;
}

// Fixed room layout node ids; these are implicit parents, never objects.
export const LAYOUT_NODE_IDS = [
  'floor',
  'ceiling',
  'wall_north',
  'wall_south',
  'wall_east',
  'wall_west',
  'middle_of_room',
] as const;

export const LAYOUT_PREPOSITIONS: readonly Preposition[] = ['on', 'in_the_corner'];

export const OBJECT_PREPOSITIONS: readonly Preposition[] = [
  'on',
  'left_of',
  'right_of',
  'in_front',
  'behind',
  'under',
  'above',
];

export const ADJACENCIES: readonly Adjacency[] = ['adjacent', 'not_adjacent'];

export const FACINGS: readonly Facing[] = [
  'north_wall',
  'east_wall',
  'south_wall',
  'west_wall',
];

export const FACING_TO_ROTATION: Record<Facing, number> = {
  north_wall: 0,
  east_wall: 90,
  south_wall: 180,
  west_wall: 270,
};

export function isLayoutNode(id: string): boolean {
  return (LAYOUT_NODE_IDS as readonly string[]).includes(id);
}
