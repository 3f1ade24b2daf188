// Pure fold of the ordered server message stream into everything the console
// renders: architecture statuses, chat transcript, sim poses and floor grid.
//
// Display colors derive from (behavior status, owning protocol status, mode).
// Behaviors of an inactive protocol render neutrally (blue border, black
// icons) even though the engine may already evaluate their entry
// preconditions: rendering follows display state, not evaluation state. With
// dynamic visualization off, process events (sensor values, precondition and
// lifecycle status) leave the view untouched entirely: the architecture shows
// structure and icons only, exactly as the initial snapshot delivered them.

import type { FloorGrid, ServerMessage, Snapshot } from './protocol.js';

export type IconColor = 'green' | 'red' | 'black';
export type NodeColor = 'blue' | 'green' | 'orange' | 'dark_gray' | 'light_gray';

export interface BehaviorDisplay {
  border: NodeColor;
  background: NodeColor;
  zoomed: boolean;
}

export interface TranscriptEntry {
  side: 'user' | 'robot' | 'system';
  bubble: 'green' | 'red' | 'white' | 'gray';
  text: string;
  intent?: string;
}

export interface ViewState {
  snapshot: Snapshot | null;
  dynamicViz: boolean;
  /** Test/preview hook: when set, wins over the snapshot's flag. */
  dynamicVizOverride: boolean | null;
  visualProgramming: boolean;
  behaviorStatus: Record<string, string>;
  protocolStatus: Record<string, string>;
  precondStatus: Record<string, string[]>;
  protocolOf: Record<string, string>;
  sensorValues: Record<string, unknown>;
  transcript: TranscriptEntry[];
  robot: { x: number; y: number; heading: number } | null;
  avatar: { x: number; y: number } | null;
  floor: FloorGrid | null;
  popup: string | null;
  ended: { success: boolean } | null;
  selectedBehavior: string | null;
  pendingChat: string[];
}

export function initViewState(overrides?: { dynamicViz?: boolean }): ViewState {
  return {
    snapshot: null,
    dynamicViz: overrides?.dynamicViz ?? true,
    dynamicVizOverride: overrides?.dynamicViz ?? null,
    visualProgramming: true,
    behaviorStatus: {},
    protocolStatus: {},
    precondStatus: {},
    protocolOf: {},
    sensorValues: {},
    transcript: [],
    robot: null,
    avatar: null,
    floor: null,
    popup: null,
    ended: null,
    selectedBehavior: null,
    pendingChat: [],
  };
}

/** Icon color of one precondition; black while its protocol is inactive. */
export function precondIconColor(
  status: string,
  protocolStatus: string,
  dynamicViz: boolean,
): IconColor {
  if (!dynamicViz || protocolStatus === 'inactive') return 'black';
  if (status === 'satisfied') return 'green';
  if (status === 'unsatisfied') return 'red';
  return 'black';
}

/** Node coloring of one behavior; total over all status combinations. */
export function behaviorDisplayFor(
  status: string,
  protocolStatus: string,
  dynamicViz: boolean,
): BehaviorDisplay {
  if (!dynamicViz || protocolStatus === 'inactive') {
    return { border: 'blue', background: 'light_gray', zoomed: false };
  }
  switch (status) {
    case 'executable':
      return { border: 'green', background: 'light_gray', zoomed: false };
    case 'executing':
      return { border: 'green', background: 'green', zoomed: true };
    case 'finished':
      return { border: 'dark_gray', background: 'dark_gray', zoomed: false };
    default: // idle
      return { border: 'blue', background: 'light_gray', zoomed: false };
  }
}

/** Border color of a protocol box; total over all protocol statuses. */
export function protocolBorderFor(status: string, dynamicViz: boolean): NodeColor {
  if (!dynamicViz) return 'blue';
  switch (status) {
    case 'active':
      return 'green';
    case 'suspended':
      return 'orange';
    case 'completed':
      return 'dark_gray';
    default: // inactive
      return 'blue';
  }
}

/** Predecessor arrows point at the predecessor and stay red until it finishes. */
export function arrowColorFor(predecessorStatus: string): 'red' | 'green' {
  return predecessorStatus === 'finished' ? 'green' : 'red';
}

/** Materialized display state of one behavior under the current view. */
export function displayOf(view: ViewState, behaviorId: string): BehaviorDisplay {
  return behaviorDisplayFor(
    view.behaviorStatus[behaviorId] ?? 'idle',
    view.protocolStatus[view.protocolOf[behaviorId] ?? ''] ?? 'inactive',
    view.dynamicViz,
  );
}

/** Materialized icon colors of one behavior's preconditions. */
export function iconColorsOf(view: ViewState, behaviorId: string): IconColor[] {
  const ipStatus = view.protocolStatus[view.protocolOf[behaviorId] ?? ''] ?? 'inactive';
  return (view.precondStatus[behaviorId] ?? []).map((status) =>
    precondIconColor(status, ipStatus, view.dynamicViz),
  );
}

function adoptSnapshot(view: ViewState, snap: Snapshot): void {
  view.snapshot = snap;
  view.dynamicViz = view.dynamicVizOverride ?? snap.flags.dynamic_viz;
  view.visualProgramming = snap.flags.visual_programming;
  view.behaviorStatus = {};
  view.protocolStatus = {};
  view.precondStatus = {};
  view.protocolOf = {};
  for (const ip of snap.protocols) {
    view.protocolStatus[ip.id] = ip.status;
    for (const b of ip.behaviors) {
      view.protocolOf[b.id] = ip.id;
      view.behaviorStatus[b.id] = b.status;
      view.precondStatus[b.id] = b.preconditions.map((pc) => pc.status);
    }
  }
  view.sensorValues = {};
  for (const s of snap.sensors) view.sensorValues[s.id] = s.value;
  view.robot = snap.robot;
  view.avatar = snap.avatar;
  view.floor = snap.floor;
}

/** Chat text the user submitted; chat_ack colors it once the server answers. */
export function applyLocalChat(view: ViewState, text: string): ViewState {
  view.pendingChat.push(text);
  return view;
}

function applyEventMessage(view: ViewState, msg: ServerMessage): void {
  const kind = msg['kind'] as string;
  // Simulation-view updates are visible in every study condition.
  if (kind === 'robot_moved') {
    view.robot = { x: msg['x'] as number, y: msg['y'] as number, heading: msg['heading'] as number };
    return;
  }
  if (kind === 'floor_update') {
    view.floor = msg['floor'] as FloorGrid;
    return;
  }
  // Everything below is architecture process information: dynamic mode only.
  if (!view.dynamicViz) return;
  if (kind === 'sensor_update') {
    const values = msg['values'] as Record<string, unknown>;
    for (const [sensorId, value] of Object.entries(values)) view.sensorValues[sensorId] = value;
  } else if (kind === 'precondition') {
    const behavior = msg['behavior'] as string;
    const index = msg['index'] as number;
    if (view.precondStatus[behavior]) {
      view.precondStatus[behavior][index] = msg['status'] as string;
    }
  } else if (kind === 'behavior_status') {
    view.behaviorStatus[msg['behavior'] as string] = msg['status'] as string;
  } else if (kind === 'protocol_status') {
    const protocol = msg['protocol'] as string;
    const status = msg['status'] as string;
    view.protocolStatus[protocol] = status;
    view.transcript.push({
      side: 'system',
      bubble: 'gray',
      text: `protocol ${protocol} is now ${status}`,
    });
  }
}

export function applyEvent(view: ViewState, msg: ServerMessage): ViewState {
  switch (msg.type) {
    case 'snapshot':
      adoptSnapshot(view, msg as unknown as Snapshot);
      break;
    case 'event':
      applyEventMessage(view, msg);
      break;
    case 'chat_ack': {
      const text = view.pendingChat.shift() ?? '';
      if (msg['recognized']) {
        view.transcript.push({
          side: 'user',
          bubble: 'green',
          text,
          intent: msg['intent'] as string,
        });
      } else {
        view.transcript.push({ side: 'user', bubble: 'red', text });
      }
      break;
    }
    case 'robot_say':
      view.transcript.push({ side: 'robot', bubble: 'white', text: msg['text'] as string });
      break;
    case 'avatar_moved':
      view.avatar = { x: msg['x'] as number, y: msg['y'] as number };
      view.popup = null;
      break;
    case 'move_rejected':
      view.popup = `That spot is unreachable (${msg['reason']})`;
      break;
    case 'session_ended':
      view.ended = { success: msg['success'] as boolean };
      break;
    default:
      break; // define_rejected and protocol_error are handled by the editor/UI shell
  }
  return view;
}

/**
 * Orders server messages by seq before folding; out-of-order arrivals are
 * buffered until the stream is contiguous again.
 */
export class MessageFolder {
  readonly view: ViewState;
  private nextSeq: number | null = null;
  private buffer = new Map<number, ServerMessage>();

  constructor(overrides?: { dynamicViz?: boolean }) {
    this.view = initViewState(overrides);
  }

  push(msg: ServerMessage): void {
    if (typeof msg.seq !== 'number') {
      applyEvent(this.view, msg);
      return;
    }
    this.buffer.set(msg.seq, msg);
    if (this.nextSeq === null) {
      // anchor the stream on the connect snapshot, whatever its seq is;
      // anything ordered before it is superseded by the snapshot anyway
      const snapshotSeqs = [...this.buffer.entries()]
        .filter(([, m]) => m.type === 'snapshot')
        .map(([seq]) => seq);
      if (snapshotSeqs.length === 0) return;
      this.nextSeq = Math.min(...snapshotSeqs);
      for (const seq of [...this.buffer.keys()]) {
        if (seq < this.nextSeq) this.buffer.delete(seq);
      }
    }
    while (this.nextSeq !== null && this.buffer.has(this.nextSeq)) {
      const ready = this.buffer.get(this.nextSeq)!;
      this.buffer.delete(this.nextSeq);
      applyEvent(this.view, ready);
      this.nextSeq += 1;
    }
  }

  localChat(text: string): void {
    applyLocalChat(this.view, text);
  }
}
