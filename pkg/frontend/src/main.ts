// Browser console shell: socket lifecycle, message folding, rendering and the
// chat / editor / info-popup interactions.

import { paintArchitecture, paintSim } from './canvas.js';
import { behaviorFormToMessage, chatMessage, clickToMove, type BehaviorForm } from './form.js';
import { renderArchitecture } from './layout.js';
import type { ClientMessage, ServerMessage } from './protocol.js';
import { MessageFolder, iconColorsOf } from './viewstate.js';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class Console {
  folder = new MessageFolder();
  socket: WebSocket | null = null;
  sendQueue: ClientMessage[] = [];
  outSeq = 0;
  selected: string | null = null;
  dismissedTutorialSteps = 0;
  tutorialSteps: string[] = [];

  connect(): void {
    const url = `ws://${location.host}/ws`;
    this.socket = new WebSocket(url);
    this.socket.onopen = () => {
      el('banner').style.display = 'none';
      for (const msg of this.sendQueue.splice(0)) this.send(msg);
    };
    this.socket.onmessage = (event) => {
      const msg = JSON.parse(event.data as string) as ServerMessage;
      this.folder.push(msg);
      if (msg.type === 'define_rejected') this.showEditorErrors(msg);
      if (msg.type === 'snapshot') this.rebuildEditorChoices();
      this.render();
    };
    this.socket.onclose = () => {
      el('banner').style.display = 'block';
      setTimeout(() => this.connect(), 1000);
    };
  }

  send(msg: ClientMessage): void {
    const stamped = { ...msg, seq: this.outSeq, tick: this.folder.view.snapshot?.tick ?? 0 };
    this.outSeq += 1;
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(JSON.stringify(stamped));
    } else {
      this.sendQueue.push(msg); // flushed on reconnect
    }
  }

  render(): void {
    const view = this.folder.view;
    paintSim(el<HTMLCanvasElement>('sim'), view);
    paintArchitecture(el<HTMLCanvasElement>('arch'), renderArchitecture(view), this.selected);
    const transcript = el('transcript');
    transcript.innerHTML = '';
    for (const entry of view.transcript) {
      const bubble = document.createElement('div');
      bubble.className = `bubble ${entry.side} ${entry.bubble}`;
      bubble.textContent = entry.intent ? `${entry.text} [${entry.intent}]` : entry.text;
      transcript.appendChild(bubble);
    }
    transcript.scrollTop = transcript.scrollHeight;
    const sensors = el('sensors');
    sensors.innerHTML = '';
    if (view.snapshot) {
      for (const sensor of view.snapshot.sensors) {
        const chip = document.createElement('span');
        chip.className = 'sensor';
        chip.title = sensor.name;
        const value = view.dynamicViz ? ` = ${JSON.stringify(view.sensorValues[sensor.id])}` : '';
        chip.textContent = `[${sensor.icon}]${value}`;
        sensors.appendChild(chip);
      }
    }
    el('popup').style.display = view.popup ? 'block' : 'none';
    el('popup').textContent = view.popup ?? '';
    const ended = el('ended');
    if (view.ended) {
      ended.style.display = 'block';
      ended.textContent = view.ended.success ? 'Goal reached!' : 'Time is up.';
    } else {
      ended.style.display = 'none';
    }
    el('editor').style.display = view.visualProgramming ? 'block' : 'none';
    this.renderDetails();
    this.renderTutorial();
  }

  renderDetails(): void {
    const view = this.folder.view;
    const panel = el('details');
    if (!this.selected || !view.snapshot) {
      panel.textContent = 'Click a behavior to inspect it.';
      return;
    }
    for (const ip of view.snapshot.protocols) {
      for (const b of ip.behaviors) {
        if (b.id !== this.selected) continue;
        const colors = iconColorsOf(view, b.id);
        const preconds = b.preconditions
          .map((pc, i) => `${pc.sensor} ${pc.op} ${JSON.stringify(pc.value)} [${colors[i] ?? 'black'}]`)
          .join('\n');
        panel.textContent = [
          `${b.title} (${b.id})`,
          `protocol: ${ip.name}`,
          `status: ${view.behaviorStatus[b.id]}`,
          b.entry ? 'entry behavior' : '',
          b.exit ? 'exit behavior' : '',
          `predecessors: ${b.predecessors.join(', ') || 'none'}`,
          `preconditions:\n${preconds || '  none'}`,
          `action: ${b.action.name}(${JSON.stringify(b.action.params)})`,
        ]
          .filter((line) => line !== '')
          .join('\n');
        return;
      }
    }
    panel.textContent = 'Click a behavior to inspect it.';
  }

  renderTutorial(): void {
    const box = el('tutorial');
    const step = this.tutorialSteps[this.dismissedTutorialSteps];
    if (!step) {
      box.style.display = 'none';
      return;
    }
    box.style.display = 'block';
    el('tutorial-text').textContent = step;
  }

  rebuildEditorChoices(): void {
    const snap = this.folder.view.snapshot;
    if (!snap) return;
    const sensorSelects = Array.from(
      document.querySelectorAll<HTMLSelectElement>('select.sensor-choice'),
    );
    for (const select of sensorSelects) {
      const current = select.value;
      select.innerHTML = '';
      for (const sensor of snap.sensors) {
        const option = document.createElement('option');
        option.value = sensor.id;
        option.textContent = sensor.name;
        select.appendChild(option);
      }
      if (current) select.value = current;
    }
    const protocolSelect = el<HTMLSelectElement>('editor-protocol');
    const chosen = protocolSelect.value;
    protocolSelect.innerHTML = '';
    for (const ip of snap.protocols) {
      const option = document.createElement('option');
      option.value = ip.id;
      option.textContent = ip.name;
      protocolSelect.appendChild(option);
    }
    if (chosen) protocolSelect.value = chosen;
  }

  showEditorErrors(msg: ServerMessage): void {
    const errors = (msg['errors'] as { path: string; code: string; message: string }[]) ?? [];
    el('editor-errors').textContent = errors.map((e) => `${e.code}: ${e.message}`).join('\n');
  }

  submitChat(): void {
    const input = el<HTMLInputElement>('chat-input');
    const text = input.value.trim();
    if (!text) return;
    this.folder.localChat(text);
    this.send(chatMessage(text));
    input.value = '';
  }

  submitBehavior(): void {
    const form: BehaviorForm = {
      id: el<HTMLInputElement>('editor-id').value.trim(),
      title: el<HTMLInputElement>('editor-title').value.trim(),
      entry: el<HTMLInputElement>('editor-entry').checked,
      exit: el<HTMLInputElement>('editor-exit').checked,
      predecessorIds: el<HTMLInputElement>('editor-preds').value,
      preconditions: [],
      actionName: el<HTMLSelectElement>('editor-action').value,
      params: [],
    };
    const sensor = el<HTMLSelectElement>('editor-sensor').value;
    const expected = el<HTMLInputElement>('editor-expected').value.trim();
    if (sensor && expected) {
      const value = expected === 'true' ? true : expected === 'false' ? false : expected;
      form.preconditions.push({
        sensor,
        op: el<HTMLSelectElement>('editor-op').value as 'eq' | 'ne',
        value,
      });
    }
    const paramName = el<HTMLInputElement>('editor-param-name').value.trim();
    if (paramName) {
      form.params.push({
        name: paramName,
        mode: el<HTMLSelectElement>('editor-param-mode').value as 'static' | 'from_world',
        value: el<HTMLInputElement>('editor-param-value').value.trim(),
      });
    }
    el('editor-errors').textContent = '';
    this.send(behaviorFormToMessage(el<HTMLSelectElement>('editor-protocol').value, form));
  }

  wire(): void {
    el('chat-send').onclick = () => this.submitChat();
    el<HTMLInputElement>('chat-input').onkeydown = (event) => {
      if (event.key === 'Enter') this.submitChat();
    };
    el('info-button').onclick = () => {
      const snap = this.folder.view.snapshot;
      if (!snap) return;
      el('info-body').textContent = snap.intents
        .map((intent) => `${intent.name}: "${intent.example}"`)
        .join('\n');
      el('info-modal').style.display = 'flex';
    };
    el('info-close').onclick = () => {
      el('info-modal').style.display = 'none';
    };
    el('popup').onclick = () => {
      this.folder.view.popup = null;
      this.render();
    };
    el('tutorial-next').onclick = () => {
      this.dismissedTutorialSteps += 1;
      this.renderTutorial();
    };
    el<HTMLCanvasElement>('sim').onclick = (event) => {
      const snap = this.folder.view.snapshot;
      if (!snap) return;
      const canvas = el<HTMLCanvasElement>('sim');
      const rect = canvas.getBoundingClientRect();
      this.send(
        clickToMove(
          event.clientX - rect.left,
          event.clientY - rect.top,
          rect.width,
          rect.height,
          snap.apartment.bounds[0],
          snap.apartment.bounds[1],
        ),
      );
    };
    el<HTMLCanvasElement>('arch').onclick = (event) => {
      const canvas = el<HTMLCanvasElement>('arch');
      const rect = canvas.getBoundingClientRect();
      const x = event.clientX - rect.left;
      const y = event.clientY - rect.top;
      const scene = renderArchitecture(this.folder.view);
      this.selected = null;
      for (const b of scene.behaviors) {
        if (x >= b.x && x <= b.x + b.w && y >= b.y && y <= b.y + b.h) this.selected = b.id;
      }
      this.render();
    };
    el('editor-submit').onclick = () => this.submitBehavior();
    fetch('./tutorial.json')
      .then((response) => (response.ok ? response.json() : []))
      .then((steps: string[]) => {
        this.tutorialSteps = steps;
        this.renderTutorial();
      })
      .catch(() => undefined);
  }
}

const app = new Console();
app.wire();
app.connect();
