// Canvas painters for the top-down simulation view and the architecture graph.

import type { Scene } from './layout.js';
import type { ViewState } from './viewstate.js';

const NODE_COLORS: Record<string, string> = {
  blue: '#2962ac',
  green: '#2e9e44',
  orange: '#d9822b',
  dark_gray: '#555555',
  light_gray: '#e8e8e8',
  red: '#c0392b',
  black: '#222222',
  white: '#ffffff',
};

const FLOOR_PALETTE = ['#f2d16b', '#b58de0', '#7fc8a9', '#e79a9a', '#9ab7e7', '#d0e77f'];

export function paintSim(canvas: HTMLCanvasElement, view: ViewState): void {
  const snap = view.snapshot;
  const ctx = canvas.getContext('2d');
  if (!snap || !ctx) return;
  const [worldW, worldH] = snap.apartment.bounds;
  const sx = canvas.width / worldW;
  const sy = canvas.height / worldH;
  const toPx = (x: number, y: number): [number, number] => [x * sx, canvas.height - y * sy];
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = '#fbfbf7';
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  // taught-region floor texture
  if (view.floor) {
    const res = view.floor.resolution;
    for (let r = 0; r < view.floor.cells.length; r += 1) {
      for (let c = 0; c < view.floor.cells[r].length; c += 1) {
        const labelIndex = view.floor.cells[r][c];
        if (labelIndex < 0) continue;
        ctx.fillStyle = FLOOR_PALETTE[labelIndex % FLOOR_PALETTE.length];
        const [px, py] = toPx(c * res, (r + 1) * res);
        ctx.fillRect(px, py, res * sx + 1, res * sy + 1);
      }
    }
  }
  // room outlines (display metadata only)
  ctx.strokeStyle = '#bbbbbb';
  ctx.setLineDash([4, 4]);
  for (const room of snap.apartment.rooms) {
    const [x, y, w, h] = room.rect;
    const [px, py] = toPx(x, y + h);
    ctx.strokeRect(px, py, w * sx, h * sy);
    ctx.fillStyle = '#999999';
    ctx.font = '12px sans-serif';
    ctx.fillText(room.name, px + 4, py + 14);
  }
  ctx.setLineDash([]);
  // walls
  ctx.fillStyle = '#333333';
  for (const [x, y, w, h] of snap.apartment.walls) {
    const [px, py] = toPx(x, y + h);
    ctx.fillRect(px, py, w * sx, h * sy);
  }
  // perception radius around the robot
  if (view.robot) {
    const [rx, ry] = toPx(view.robot.x, view.robot.y);
    ctx.strokeStyle = 'rgba(46,158,68,0.5)';
    ctx.beginPath();
    ctx.arc(rx, ry, snap.perception_radius * sx, 0, Math.PI * 2);
    ctx.stroke();
    ctx.fillStyle = '#2962ac';
    ctx.beginPath();
    ctx.arc(rx, ry, 9, 0, Math.PI * 2);
    ctx.fill();
    ctx.strokeStyle = '#ffffff';
    ctx.beginPath();
    ctx.moveTo(rx, ry);
    ctx.lineTo(rx + 12 * Math.cos(-view.robot.heading), ry + 12 * Math.sin(-view.robot.heading));
    ctx.stroke();
  }
  if (view.avatar) {
    const [ax, ay] = toPx(view.avatar.x, view.avatar.y);
    ctx.fillStyle = '#c0392b';
    ctx.beginPath();
    ctx.arc(ax, ay, 7, 0, Math.PI * 2);
    ctx.fill();
  }
}

export function paintArchitecture(
  canvas: HTMLCanvasElement,
  scene: Scene,
  selected: string | null,
): void {
  const ctx = canvas.getContext('2d');
  if (!ctx) return;
  canvas.width = Math.max(scene.width, 400);
  canvas.height = Math.max(scene.height, 120);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = '13px sans-serif';
  for (const ip of scene.protocols) {
    ctx.strokeStyle = NODE_COLORS[ip.border];
    ctx.lineWidth = 2;
    ctx.strokeRect(ip.x, ip.y, ip.w, ip.h);
    ctx.fillStyle = '#222222';
    ctx.fillText(ip.name, ip.x, ip.y - 6);
  }
  for (const arrow of scene.arrows) {
    ctx.strokeStyle = NODE_COLORS[arrow.color];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(arrow.x1, arrow.y1);
    ctx.lineTo(arrow.x2, arrow.y2);
    ctx.stroke();
    const angle = Math.atan2(arrow.y2 - arrow.y1, arrow.x2 - arrow.x1);
    const hx = arrow.x2 - 18 * Math.cos(angle);
    const hy = arrow.y2 - 18 * Math.sin(angle);
    ctx.beginPath();
    ctx.moveTo(hx, hy);
    ctx.lineTo(hx - 8 * Math.cos(angle - 0.4), hy - 8 * Math.sin(angle - 0.4));
    ctx.lineTo(hx - 8 * Math.cos(angle + 0.4), hy - 8 * Math.sin(angle + 0.4));
    ctx.closePath();
    ctx.fillStyle = NODE_COLORS[arrow.color];
    ctx.fill();
  }
  for (const b of scene.behaviors) {
    // executing behaviors zoom automatically; a clicked behavior zooms too
    const scale = b.zoomed || b.id === selected ? 1.25 : 1.0;
    const w = b.w * scale;
    const h = b.h * scale;
    const x = b.x - (w - b.w) / 2;
    const y = b.y - (h - b.h) / 2;
    ctx.fillStyle = NODE_COLORS[b.background];
    ctx.fillRect(x, y, w, h);
    ctx.strokeStyle = NODE_COLORS[b.border];
    ctx.lineWidth = b.id === selected ? 4 : 2;
    ctx.strokeRect(x, y, w, h);
    ctx.fillStyle = b.background === 'dark_gray' ? '#ffffff' : '#222222';
    ctx.fillText(b.title, x + 18, y + 16, w - 36);
    ctx.font = '11px sans-serif';
    ctx.fillText(b.actionName, x + 18, y + 32, w - 36);
    ctx.font = '13px sans-serif';
    if (b.entryMarker) {
      ctx.fillStyle = NODE_COLORS[b.border];
      ctx.font = 'bold 16px sans-serif';
      ctx.fillText('»', x + 3, y + h / 2 + 5);
      ctx.font = '13px sans-serif';
    }
    if (b.exitMarker) {
      ctx.fillStyle = NODE_COLORS[b.border];
      ctx.font = 'bold 16px sans-serif';
      ctx.fillText('»', x + w - 15, y + h / 2 + 5);
      ctx.font = '13px sans-serif';
    }
    b.icons.forEach((icon, index) => {
      ctx.fillStyle = NODE_COLORS[icon.color] ?? '#222222';
      ctx.beginPath();
      ctx.arc(x + 22 + index * 18, y + h - 16, 6, 0, Math.PI * 2);
      ctx.fill();
    });
  }
}
