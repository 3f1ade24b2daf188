// Wire protocol types shared with the session server (newline-delimited JSON).

export interface ServerMessage {
  type: string;
  seq: number;
  tick: number;
  [key: string]: unknown;
}

export interface ClientMessage {
  type: string;
  [key: string]: unknown;
}

export interface PreconditionNode {
  sensor: string;
  op: 'eq' | 'ne';
  value: unknown;
  status: 'unknown' | 'satisfied' | 'unsatisfied';
}

export interface ActionNode {
  name: string;
  params: Record<string, { static?: unknown; from_world?: string }>;
}

export interface BehaviorNode {
  id: string;
  title: string;
  entry: boolean;
  exit: boolean;
  predecessors: string[];
  preconditions: PreconditionNode[];
  action: ActionNode;
  status: 'idle' | 'executable' | 'executing' | 'finished';
  def_index: number;
}

export interface ProtocolNode {
  id: string;
  name: string;
  priority: number;
  status: 'inactive' | 'active' | 'suspended' | 'completed';
  last_finished: string | null;
  behaviors: BehaviorNode[];
}

export interface SensorNode {
  id: string;
  name: string;
  icon: string;
  value: unknown;
}

export interface FloorGrid {
  resolution: number;
  labels: string[];
  cells: number[][];
}

export interface Snapshot {
  phase: string;
  tick: number;
  elapsed_s: number;
  time_limit_s: number;
  flags: { dynamic_viz: boolean; visual_programming: boolean };
  robot: { x: number; y: number; heading: number };
  avatar: { x: number; y: number };
  perception_radius: number;
  goal: string[];
  taught: { x: number; y: number; label: string }[];
  sensors: SensorNode[];
  intents: { name: string; example: string }[];
  apartment: {
    bounds: [number, number];
    walls: [number, number, number, number][];
    rooms: { name: string; rect: [number, number, number, number] }[];
  };
  protocols: ProtocolNode[];
  executing: [string, string] | null;
  suspended_stack: string[];
  floor: FloorGrid;
}

export type SnapshotMessage = ServerMessage & Snapshot;
