import type { WhatifResponse } from "./types.js";

const SVG = "http://www.w3.org/2000/svg";
const WIDTH = 560;
const HEIGHT = 240;
const PAD = { left: 52, right: 16, top: 12, bottom: 30 };

export interface SweepChart {
  root: HTMLElement;
  /** Draw a sweep; `currentRating` gets a marker line. */
  render(resp: WhatifResponse, currentRating: number): void;
  /** Inline error; the previous chart stays on screen. */
  showError(message: string): void;
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

export function createSweepChart(onPick: (rating: number) => void): SweepChart {
  const root = document.createElement("div");
  root.className = "sweep-chart";
  const error = document.createElement("p");
  error.className = "sweep-error";
  error.hidden = true;
  const readout = document.createElement("p");
  readout.className = "sweep-readout";
  readout.textContent = " ";
  const holder = document.createElement("div");
  root.append(error, holder, readout);

  function render(resp: WhatifResponse, currentRating: number): void {
    error.hidden = true;
    const points = resp.points;
    const ratings = points.map((p) => p.rating);
    const efforts = points.map((p) => p.effort_pm);
    const rMin = Math.min(...ratings);
    const rMax = Math.max(...ratings);
    const eMin = Math.min(...efforts);
    const eMax = Math.max(...efforts);
    const rSpan = rMax - rMin || 1;
    const eSpan = eMax - eMin || 1;
    const x = (r: number) =>
      PAD.left + ((r - rMin) / rSpan) * (WIDTH - PAD.left - PAD.right);
    const y = (e: number) =>
      HEIGHT - PAD.bottom - ((e - eMin) / eSpan) * (HEIGHT - PAD.top - PAD.bottom);

    const svg = el("svg", {
      viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
      width: String(WIDTH),
      height: String(HEIGHT),
      role: "img",
    });
    svg.append(
      el("line", {
        x1: String(PAD.left), y1: String(HEIGHT - PAD.bottom),
        x2: String(WIDTH - PAD.right), y2: String(HEIGHT - PAD.bottom),
        class: "axis",
      }),
      el("line", {
        x1: String(PAD.left), y1: String(PAD.top),
        x2: String(PAD.left), y2: String(HEIGHT - PAD.bottom),
        class: "axis",
      }),
    );
    for (const [value, label] of [
      [eMin, eMin.toFixed(1)],
      [eMax, eMax.toFixed(1)],
    ] as const) {
      const text = el("text", {
        x: String(PAD.left - 6), y: String(y(value) + 4),
        "text-anchor": "end", class: "tick",
      });
      text.textContent = label;
      svg.append(text);
    }
    for (const r of [rMin, rMax]) {
      const text = el("text", {
        x: String(x(r)), y: String(HEIGHT - PAD.bottom + 18),
        "text-anchor": "middle", class: "tick",
      });
      text.textContent = r.toFixed(1);
      svg.append(text);
    }

    if (currentRating >= rMin && currentRating <= rMax) {
      svg.append(
        el("line", {
          x1: String(x(currentRating)), y1: String(PAD.top),
          x2: String(x(currentRating)), y2: String(HEIGHT - PAD.bottom),
          class: "current-marker",
        }),
      );
    }

    if (points.length > 1) {
      svg.append(
        el("polyline", {
          points: points.map((p) => `${x(p.rating)},${y(p.effort_pm)}`).join(" "),
          class: "curve",
        }),
      );
    }
    for (const point of points) {
      const dot = el("circle", {
        cx: String(x(point.rating)), cy: String(y(point.effort_pm)),
        r: "5", class: "point", tabindex: "0",
      });
      const title = el("title", {});
      title.textContent = `rating ${point.rating.toFixed(2)}: ${point.effort_pm.toFixed(2)} pm`;
      dot.append(title);
      dot.addEventListener("mouseenter", () => {
        readout.textContent = `rating ${point.rating.toFixed(2)}: ${point.effort_pm.toFixed(2)} person-months`;
      });
      dot.addEventListener("click", () => onPick(point.rating));
      svg.append(dot);
    }
    holder.replaceChildren(svg);
  }

  function showError(message: string): void {
    error.textContent = message;
    error.hidden = false;
  }

  return { root, render, showError };
}
