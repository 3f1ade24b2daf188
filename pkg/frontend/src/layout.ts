// Architecture scene description: protocols as stacked rectangles with their
// behaviors laid out in an evenly distributed row, predecessor arrows drawn
// from each behavior toward its predecessor. Pure data out; canvas painting
// lives elsewhere so tests can assert on geometry and colors directly.

import type { Snapshot } from './protocol.js';
import {
  arrowColorFor,
  displayOf,
  iconColorsOf,
  protocolBorderFor,
  type NodeColor,
  type ViewState,
} from './viewstate.js';

export const BEHAVIOR_W = 150;
export const BEHAVIOR_H = 78;
export const ZOOM_SCALE = 1.25;
const IP_PAD = 18;
const IP_GAP = 26;
const IP_LABEL_H = 22;

export interface BehaviorScene {
  kind: 'behavior';
  id: string;
  protocolId: string;
  x: number;
  y: number;
  w: number;
  h: number;
  title: string;
  actionName: string;
  border: NodeColor;
  background: NodeColor;
  zoomed: boolean;
  entryMarker: boolean; // big double arrows on the left edge
  exitMarker: boolean; // big double arrows on the right edge
  icons: { sensor: string; icon: string; color: string }[];
}

export interface ProtocolScene {
  kind: 'ip';
  id: string;
  x: number;
  y: number;
  w: number;
  h: number;
  name: string;
  border: NodeColor;
}

export interface ArrowScene {
  from: string; // behavior id
  to: string; // predecessor id
  color: 'red' | 'green';
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface Scene {
  protocols: ProtocolScene[];
  behaviors: BehaviorScene[];
  arrows: ArrowScene[];
  width: number;
  height: number;
}

/** Even horizontal distribution: the flat-row case of a tidy tree layout. */
function rowOffsets(count: number, width: number): number[] {
  const offsets: number[] = [];
  for (let index = 0; index < count; index += 1) {
    offsets.push(IP_PAD + index * (width + IP_PAD));
  }
  return offsets;
}

export function renderArchitecture(view: ViewState): Scene {
  const scene: Scene = { protocols: [], behaviors: [], arrows: [], width: 0, height: 0 };
  const snap: Snapshot | null = view.snapshot;
  if (!snap) return scene;
  let y = IP_GAP;
  for (const ip of snap.protocols) {
    const count = ip.behaviors.length;
    const innerW = count > 0 ? count * (BEHAVIOR_W + IP_PAD) + IP_PAD : 2 * IP_PAD + 60;
    const ipH = IP_LABEL_H + BEHAVIOR_H + 2 * IP_PAD;
    const status = view.protocolStatus[ip.id] ?? ip.status;
    scene.protocols.push({
      kind: 'ip',
      id: ip.id,
      x: IP_GAP,
      y,
      w: innerW,
      h: ipH,
      name: ip.name,
      border: protocolBorderFor(status, view.dynamicViz),
    });
    const offsets = rowOffsets(count, BEHAVIOR_W);
    const centers = new Map<string, { x: number; y: number }>();
    ip.behaviors.forEach((b, index) => {
      const display = displayOf(view, b.id);
      const iconColors = iconColorsOf(view, b.id);
      const bx = IP_GAP + offsets[index];
      const by = y + IP_LABEL_H + IP_PAD;
      centers.set(b.id, { x: bx + BEHAVIOR_W / 2, y: by + BEHAVIOR_H / 2 });
      scene.behaviors.push({
        kind: 'behavior',
        id: b.id,
        protocolId: ip.id,
        x: bx,
        y: by,
        w: BEHAVIOR_W,
        h: BEHAVIOR_H,
        title: b.title,
        actionName: b.action.name,
        border: display.border,
        background: display.background,
        zoomed: display.zoomed,
        entryMarker: b.entry,
        exitMarker: b.exit,
        icons: b.preconditions.map((pc, pcIndex) => {
          const sensor = snap.sensors.find((s) => s.id === pc.sensor);
          return {
            sensor: pc.sensor,
            icon: sensor?.icon ?? 'sensor',
            color: iconColors[pcIndex] ?? 'black',
          };
        }),
      });
    });
    for (const b of ip.behaviors) {
      for (const pred of b.predecessors) {
        const from = centers.get(b.id);
        const to = centers.get(pred);
        if (!from || !to) continue;
        const predStatus = view.dynamicViz ? view.behaviorStatus[pred] ?? 'idle' : 'idle';
        scene.arrows.push({
          from: b.id,
          to: pred,
          color: arrowColorFor(predStatus),
          x1: from.x,
          y1: from.y,
          x2: to.x,
          y2: to.y,
        });
      }
    }
    scene.width = Math.max(scene.width, IP_GAP + innerW + IP_GAP);
    y += ipH + IP_GAP;
  }
  scene.height = y;
  return scene;
}
