// Piano roll geometry and rendering: one lane per class, markers at
// positions proportional to time, velocity shown as opacity and height.
// The layout is pure data so tests can assert on it without a DOM.

import { UiEvent } from './state.js';

export type Marker = {
  label: string;
  lane: number;
  x: number;
  y: number;
  width: number;
  height: number;
  opacity: number;
};

export type Lane = { label: string; y: number; height: number };

export type PianoRollLayout = {
  width: number;
  height: number;
  lanes: Lane[];
  markers: Marker[];
  exportEnabled: boolean;
};

export function pianoRollLayout(
  events: UiEvent[],
  classNames: string[],
  duration: number,
  width = 800,
  laneHeight = 48,
): PianoRollLayout {
  const lanes = classNames.map((label, i) => ({ label, y: i * laneHeight, height: laneHeight }));
  const span = Math.max(duration, ...events.map((e) => e.time + 0.2), 1);
  const markers: Marker[] = [];
  for (const event of events) {
    const lane = classNames.indexOf(event.label);
    if (lane < 0) continue; // the service never sends labels outside the model
    const velocity = Math.max(1, Math.min(127, event.velocity));
    const markerHeight = (laneHeight - 8) * (0.3 + 0.7 * (velocity / 127));
    markers.push({
      label: event.label,
      lane,
      x: (event.time / span) * width,
      y: lanes[lane].y + (laneHeight - markerHeight) / 2,
      width: 6,
      height: markerHeight,
      opacity: 0.35 + 0.65 * (velocity / 127),
    });
  }
  return {
    width,
    height: lanes.length * laneHeight,
    lanes,
    markers,
    exportEnabled: events.length > 0,
  };
}

export function renderPianoRollSvg(layout: PianoRollLayout): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" ` +
    `height="${layout.height}" class="piano-roll">`,
  );
  for (const lane of layout.lanes) {
    parts.push(
      `<rect x="0" y="${lane.y}" width="${layout.width}" height="${lane.height}" ` +
      `class="lane" fill="${lane.y / lane.height % 2 ? '#20242b' : '#262b33'}"/>`,
    );
    parts.push(
      `<text x="6" y="${lane.y + 16}" fill="#8b93a1" font-size="12">${lane.label}</text>`,
    );
  }
  for (const marker of layout.markers) {
    parts.push(
      `<rect x="${marker.x.toFixed(1)}" y="${marker.y.toFixed(1)}" ` +
      `width="${marker.width}" height="${marker.height.toFixed(1)}" rx="2" ` +
      `class="marker" fill="#5ac8fa" fill-opacity="${marker.opacity.toFixed(2)}"/>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
}
