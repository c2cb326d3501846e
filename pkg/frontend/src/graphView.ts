/** SVG graph view: seeded force layout, category-colored nodes, click
 * selection, wheel zoom and drag pan. No rendering libraries — every
 * element is namespaced DOM, so a test can count exactly what a viewer
 * would see and compare it to the service's reported counts.
 */

import { layoutGraph, type Point } from "./layout.js";
import type { GraphNodePayload, GraphPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RenderCounts {
  nodes: number;
  edges: number;
}

export interface GraphViewOptions {
  width?: number;
  height?: number;
  iterations?: number;
  seed?: number;
  onSelect?: (node: GraphNodePayload | null) => void;
}

/** Stable categorical color for a node's leading label. */
export function labelColor(label: string | undefined): string {
  const palette = [
    "#4c78a8",
    "#f58518",
    "#54a24b",
    "#e45756",
    "#72b7b2",
    "#b279a2",
    "#eeca3b",
    "#9d755d",
  ];
  if (!label) return "#8a8a8a";
  let hash = 0;
  for (let i = 0; i < label.length; i++) {
    hash = (hash * 31 + label.charCodeAt(i)) >>> 0;
  }
  return palette[hash % palette.length];
}

export function displayName(node: GraphNodePayload): string {
  const tag = node.properties["tagName"];
  return typeof tag === "string" && tag ? tag : node.id;
}

export class GraphView {
  readonly svg: SVGSVGElement;
  private readonly width: number;
  private readonly height: number;
  private readonly iterations: number;
  private readonly seed: number;
  private readonly onSelect?: (node: GraphNodePayload | null) => void;

  private graph: GraphPayload = { nodes: [], edges: [] };
  private positions = new Map<string, Point>();
  private selectedId: string | null = null;

  // viewBox state for pan/zoom
  private viewX = 0;
  private viewY = 0;
  private viewW: number;
  private viewH: number;

  constructor(container: HTMLElement, options: GraphViewOptions = {}) {
    this.width = options.width ?? 1200;
    this.height = options.height ?? 800;
    this.iterations = options.iterations ?? 120;
    this.seed = options.seed ?? 42;
    this.onSelect = options.onSelect;
    this.viewW = this.width;
    this.viewH = this.height;

    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("class", "gv-canvas");
    this.svg.setAttribute("role", "img");
    this.applyViewBox();
    container.appendChild(this.svg);
    this.bindPanZoom();
  }

  /** Replace the rendered graph: full re-layout and re-render. */
  setGraph(graph: GraphPayload): RenderCounts {
    this.graph = graph;
    this.positions = layoutGraph(graph, {
      width: this.width,
      height: this.height,
      iterations: this.iterations,
      seed: this.seed,
    });
    this.selectedId = null;
    this.resetView();
    this.render();
    return this.renderedCounts();
  }

  /** What is actually in the DOM right now. */
  renderedCounts(): RenderCounts {
    return {
      nodes: this.svg.querySelectorAll(".gv-node").length,
      edges: this.svg.querySelectorAll(".gv-edge").length,
    };
  }

  select(nodeId: string | null): void {
    this.selectedId = nodeId;
    for (const el of Array.from(this.svg.querySelectorAll(".gv-node"))) {
      el.classList.toggle("gv-selected", el.getAttribute("data-node-id") === nodeId);
    }
    const node = this.graph.nodes.find((n) => n.id === nodeId) ?? null;
    this.onSelect?.(node);
  }

  get selected(): string | null {
    return this.selectedId;
  }

  private render(): void {
    while (this.svg.firstChild) this.svg.removeChild(this.svg.firstChild);

    const edgeLayer = document.createElementNS(SVG_NS, "g");
    edgeLayer.setAttribute("class", "gv-edges");
    for (const edge of this.graph.edges) {
      const from = this.positions.get(edge.source);
      const to = this.positions.get(edge.target);
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("class", "gv-edge");
      line.setAttribute("data-edge-type", edge.type);
      line.setAttribute("x1", String(from?.x ?? 0));
      line.setAttribute("y1", String(from?.y ?? 0));
      line.setAttribute("x2", String(to?.x ?? 0));
      line.setAttribute("y2", String(to?.y ?? 0));
      edgeLayer.appendChild(line);
    }
    this.svg.appendChild(edgeLayer);

    const nodeLayer = document.createElementNS(SVG_NS, "g");
    nodeLayer.setAttribute("class", "gv-nodes");
    for (const node of this.graph.nodes) {
      const pos = this.positions.get(node.id);
      if (!pos) continue;
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("class", "gv-node");
      group.setAttribute("data-node-id", node.id);
      group.setAttribute("transform", `translate(${pos.x},${pos.y})`);

      const circle = document.createElementNS(SVG_NS, "circle");
      const tagged = typeof node.properties["tagName"] === "string";
      circle.setAttribute("r", tagged ? "11" : "7");
      circle.setAttribute("fill", labelColor(node.labels[0]));
      group.appendChild(circle);

      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("class", "gv-label");
      text.setAttribute("dy", "-14");
      text.textContent = displayName(node);
      group.appendChild(text);

      group.addEventListener("click", (event) => {
        event.stopPropagation();
        this.select(node.id);
      });
      nodeLayer.appendChild(group);
    }
    this.svg.appendChild(nodeLayer);

    this.svg.addEventListener("click", () => this.select(null));
  }

  private applyViewBox(): void {
    this.svg.setAttribute(
      "viewBox",
      `${this.viewX} ${this.viewY} ${this.viewW} ${this.viewH}`,
    );
  }

  private resetView(): void {
    this.viewX = 0;
    this.viewY = 0;
    this.viewW = this.width;
    this.viewH = this.height;
    this.applyViewBox();
  }

  private bindPanZoom(): void {
    let dragging = false;
    let lastX = 0;
    let lastY = 0;

    this.svg.addEventListener("mousedown", (event) => {
      dragging = true;
      lastX = (event as MouseEvent).clientX;
      lastY = (event as MouseEvent).clientY;
    });
    this.svg.addEventListener("mousemove", (event) => {
      if (!dragging) return;
      const e = event as MouseEvent;
      const scale = this.viewW / this.width;
      this.viewX -= (e.clientX - lastX) * scale;
      this.viewY -= (e.clientY - lastY) * scale;
      lastX = e.clientX;
      lastY = e.clientY;
      this.applyViewBox();
    });
    this.svg.addEventListener("mouseup", () => {
      dragging = false;
    });
    this.svg.addEventListener("mouseleave", () => {
      dragging = false;
    });
    this.svg.addEventListener("wheel", (event) => {
      const e = event as WheelEvent;
      e.preventDefault();
      const factor = e.deltaY > 0 ? 1.15 : 1 / 1.15;
      const newW = Math.max(this.width / 16, Math.min(this.width * 4, this.viewW * factor));
      const newH = (newW / this.viewW) * this.viewH;
      // Keep the view centered while zooming.
      this.viewX += (this.viewW - newW) / 2;
      this.viewY += (this.viewH - newH) / 2;
      this.viewW = newW;
      this.viewH = newH;
      this.applyViewBox();
    });
  }
}
