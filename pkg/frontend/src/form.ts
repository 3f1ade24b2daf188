// Outbound message builders: the behavior editor form, the chat box, and the
// click-to-teleport mapping from canvas pixels to apartment meters.

import type { ClientMessage } from './protocol.js';

export interface PreconditionRow {
  sensor: string;
  op: 'eq' | 'ne';
  value: unknown;
}

export interface ParamRow {
  name: string;
  mode: 'static' | 'from_world';
  value: string;
}

export interface BehaviorForm {
  id: string;
  title: string;
  entry: boolean;
  exit: boolean;
  /** Comma- or space-separated predecessor ids, as typed into the text field. */
  predecessorIds: string;
  preconditions: PreconditionRow[];
  actionName: string;
  params: ParamRow[];
}

function parseStatic(raw: string): unknown {
  if (raw === 'true') return true;
  if (raw === 'false') return false;
  const asNumber = Number(raw);
  if (raw.trim() !== '' && !Number.isNaN(asNumber)) return asNumber;
  return raw;
}

export function behaviorFormToMessage(protocolId: string, form: BehaviorForm): ClientMessage {
  const params: Record<string, { static?: unknown; from_world?: string }> = {};
  for (const row of form.params) {
    params[row.name] =
      row.mode === 'static' ? { static: parseStatic(row.value) } : { from_world: row.value };
  }
  return {
    type: 'define_behavior',
    protocol_id: protocolId,
    behavior: {
      id: form.id,
      title: form.title,
      entry: form.entry,
      exit: form.exit,
      predecessors: form.predecessorIds
        .split(/[\s,]+/)
        .map((s) => s.trim())
        .filter((s) => s.length > 0),
      preconditions: form.preconditions.map((row) => ({
        sensor: row.sensor,
        op: row.op,
        value: row.value,
      })),
      action: { name: form.actionName, params },
    },
  };
}

export function chatMessage(text: string): ClientMessage {
  return { type: 'chat', text };
}

/**
 * Canvas pixels to apartment meters; the canvas y axis points down while the
 * apartment y axis points up, so the vertical coordinate flips.
 */
export function clickToWorld(
  px: number,
  py: number,
  canvasW: number,
  canvasH: number,
  worldW: number,
  worldH: number,
): { x: number; y: number } {
  return {
    x: (px / canvasW) * worldW,
    y: (1 - py / canvasH) * worldH,
  };
}

export function clickToMove(
  px: number,
  py: number,
  canvasW: number,
  canvasH: number,
  worldW: number,
  worldH: number,
): ClientMessage {
  const world = clickToWorld(px, py, canvasW, canvasH, worldW, worldH);
  return { type: 'move_avatar', x: world.x, y: world.y };
}
