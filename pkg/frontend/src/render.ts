/** Small DOM helpers and the SVG renderer for the schematic process view. */

import { GraphLayout, NodeBox } from "./layout.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

const CELL_W = 190;
const CELL_H = 86;
const BOX_W = 150;
const BOX_H = 46;
const LANE_LABEL_W = 170;

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS("http://www.w3.org/2000/svg", tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

function center(node: NodeBox): { cx: number; cy: number } {
  return {
    cx: LANE_LABEL_W + node.x * CELL_W + CELL_W / 2,
    cy: node.y * CELL_H + CELL_H / 2,
  };
}

function nodeShape(node: NodeBox, selected: boolean): SVGElement {
  const group = svgEl("g", { class: `node node-${node.kind}${selected ? " selected" : ""}` });
  const { cx, cy } = center(node);
  if (node.kind === "gateway") {
    const r = 24;
    group.append(
      svgEl("polygon", {
        points: `${cx},${cy - r} ${cx + r},${cy} ${cx},${cy + r} ${cx - r},${cy}`,
      }),
    );
  } else if (node.kind === "event") {
    group.append(svgEl("circle", { cx: String(cx), cy: String(cy), r: "18" }));
  } else {
    group.append(
      svgEl("rect", {
        x: String(cx - BOX_W / 2),
        y: String(cy - BOX_H / 2),
        width: String(BOX_W),
        height: String(BOX_H),
        rx: "8",
      }),
    );
  }
  const text = svgEl("text", { x: String(cx), y: String(cy + 4), "text-anchor": "middle" });
  const label = node.label.length > 24 ? `${node.label.slice(0, 23)}…` : node.label;
  text.textContent = label;
  group.append(text);
  const title = svgEl("title", {});
  title.textContent = `${node.id} (${node.lane})`;
  group.append(title);
  return group;
}

export function renderGraphSvg(
  layout: GraphLayout,
  selectedGateway: string | null,
  onPick: (nodeId: string) => void,
): SVGSVGElement {
  const rows = Math.max(1, ...layout.lanes.map((l) => l.y + 1));
  const width = LANE_LABEL_W + layout.columns * CELL_W + 20;
  const height = rows * CELL_H + 10;
  const svg = svgEl("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: "process-canvas",
  }) as SVGSVGElement;

  for (const lane of layout.lanes) {
    svg.append(
      svgEl("rect", {
        x: "0",
        y: String(lane.y * CELL_H),
        width: String(width),
        height: String(CELL_H),
        class: "lane-band",
      }),
    );
    const label = svgEl("text", {
      x: "10",
      y: String(lane.y * CELL_H + CELL_H / 2),
      class: "lane-label",
    });
    label.textContent = `${lane.pool} / ${lane.lane}`;
    svg.append(label);
  }

  const positions = new Map(layout.nodes.map((n) => [n.id, center(n)]));
  for (const edge of layout.edges) {
    const from = positions.get(edge.from);
    const to = positions.get(edge.to);
    if (!from || !to) continue;
    svg.append(
      svgEl("line", {
        x1: String(from.cx),
        y1: String(from.cy),
        x2: String(to.cx),
        y2: String(to.cy),
        class: `edge edge-${edge.kind}`,
        "marker-end": "url(#arrow)",
      }),
    );
  }
  const defs = svgEl("defs", {});
  const marker = svgEl("marker", {
    id: "arrow",
    viewBox: "0 0 10 10",
    refX: "9",
    refY: "5",
    markerWidth: "7",
    markerHeight: "7",
    orient: "auto-start-reverse",
  });
  marker.append(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z" }));
  defs.append(marker);
  svg.prepend(defs);

  for (const node of layout.nodes) {
    const shape = nodeShape(node, node.id === selectedGateway);
    if (node.kind === "gateway") {
      shape.addEventListener("click", () => onPick(node.id));
    }
    svg.append(shape);
  }
  return svg;
}
