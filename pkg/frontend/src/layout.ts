/** Dependency-free force-directed layout.
 *
 * Classic spring-embedder: pairwise repulsion, spring attraction along
 * edges, weak gravity toward the center, and a cooling step cap. Seeded
 * initial placement makes the result deterministic for a given graph, so
 * re-renders are stable and testable. O(n² · iterations) — fine for the
 * few hundred nodes a condensed P&ID has.
 */

import type { GraphPayload } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export interface LayoutOptions {
  width?: number;
  height?: number;
  iterations?: number;
  seed?: number;
}

/** Deterministic 32-bit PRNG (mulberry32), good enough for jittered placement. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function layoutGraph(graph: GraphPayload, options: LayoutOptions = {}): Map<string, Point> {
  const width = options.width ?? 1200;
  const height = options.height ?? 800;
  const iterations = options.iterations ?? 120;
  const rand = mulberry32(options.seed ?? 42);

  const ids = graph.nodes.map((n) => n.id);
  const n = ids.length;
  const positions = new Map<string, Point>();
  if (n === 0) return positions;

  const index = new Map<string, number>();
  ids.forEach((id, i) => index.set(id, i));

  // Start on a circle with jitter: spreads components apart and avoids
  // the degenerate all-at-origin start.
  const radius = Math.min(width, height) * 0.38;
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / n;
    xs[i] = width / 2 + radius * Math.cos(angle) + (rand() - 0.5) * radius * 0.3;
    ys[i] = height / 2 + radius * Math.sin(angle) + (rand() - 0.5) * radius * 0.3;
  }

  // Edge list as index pairs; self-loops exert no layout force.
  const springs: Array<[number, number]> = [];
  for (const edge of graph.edges) {
    const a = index.get(edge.source);
    const b = index.get(edge.target);
    if (a === undefined || b === undefined || a === b) continue;
    springs.push([a, b]);
  }

  const k = Math.sqrt((width * height) / n); // ideal edge length
  const dx = new Float64Array(n);
  const dy = new Float64Array(n);

  for (let iter = 0; iter < iterations; iter++) {
    dx.fill(0);
    dy.fill(0);

    // Repulsion between every pair.
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let ddx = xs[i] - xs[j];
        let ddy = ys[i] - ys[j];
        let dist2 = ddx * ddx + ddy * ddy;
        if (dist2 < 1e-4) {
          ddx = (rand() - 0.5) * 0.1;
          ddy = (rand() - 0.5) * 0.1;
          dist2 = ddx * ddx + ddy * ddy;
        }
        const force = (k * k) / dist2;
        dx[i] += ddx * force;
        dy[i] += ddy * force;
        dx[j] -= ddx * force;
        dy[j] -= ddy * force;
      }
    }

    // Spring attraction along edges.
    for (const [a, b] of springs) {
      const ddx = xs[a] - xs[b];
      const ddy = ys[a] - ys[b];
      const dist = Math.sqrt(ddx * ddx + ddy * ddy) || 1e-2;
      const force = dist / k;
      const fx = (ddx / dist) * force * dist * 0.05;
      const fy = (ddy / dist) * force * dist * 0.05;
      dx[a] -= fx;
      dy[a] -= fy;
      dx[b] += fx;
      dy[b] += fy;
    }

    // Gravity toward the center keeps disconnected pieces on screen.
    for (let i = 0; i < n; i++) {
      dx[i] += (width / 2 - xs[i]) * 0.02;
      dy[i] += (height / 2 - ys[i]) * 0.02;
    }

    // Cooling: displacement cap shrinks linearly to a small floor.
    const temperature = (Math.min(width, height) / 10) * (1 - iter / iterations) + 1;
    for (let i = 0; i < n; i++) {
      const disp = Math.sqrt(dx[i] * dx[i] + dy[i] * dy[i]) || 1e-9;
      const step = Math.min(disp, temperature);
      xs[i] += (dx[i] / disp) * step;
      ys[i] += (dy[i] / disp) * step;
    }
  }

  // Normalize into the viewport with a margin.
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (let i = 0; i < n; i++) {
    minX = Math.min(minX, xs[i]);
    maxX = Math.max(maxX, xs[i]);
    minY = Math.min(minY, ys[i]);
    maxY = Math.max(maxY, ys[i]);
  }
  const margin = 40;
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  for (let i = 0; i < n; i++) {
    positions.set(ids[i], {
      x: margin + ((xs[i] - minX) / spanX) * (width - 2 * margin),
      y: margin + ((ys[i] - minY) / spanY) * (height - 2 * margin),
    });
  }
  return positions;
}
