// Tiny DOT digraph reader and SVG renderer. The server is the layout and
// narrative authority; the client only needs enough parsing to draw the
// handful of links a session can hold.

export interface DotGraph {
  nodes: string[];
  edges: { from: string; to: string }[];
}

const EDGE_RE = /^\s*"([^"]+)"\s*->\s*"([^"]+)"/;
const NODE_RE = /^\s*"([^"]+)"\s*(\[[^\]]*\])?\s*;/;

export function parseDot(text: string): DotGraph {
  const nodes: string[] = [];
  const edges: { from: string; to: string }[] = [];
  const seen = new Set<string>();
  const addNode = (name: string) => {
    if (!seen.has(name)) {
      seen.add(name);
      nodes.push(name);
    }
  };
  for (const line of text.split("\n")) {
    const edge = EDGE_RE.exec(line);
    if (edge) {
      addNode(edge[1]);
      addNode(edge[2]);
      edges.push({ from: edge[1], to: edge[2] });
      continue;
    }
    const node = NODE_RE.exec(line);
    if (node) {
      addNode(node[1]);
    }
  }
  return { nodes, edges };
}

/** Longest-path layering: each node sits one column right of its deepest
 * parent, which keeps every arrow pointing left-to-right. */
export function layerGraph(graph: DotGraph): Map<string, number> {
  const layer = new Map<string, number>();
  for (const node of graph.nodes) layer.set(node, 0);
  // relax |V| times; session graphs are trees so this settles immediately
  for (let pass = 0; pass < graph.nodes.length; pass++) {
    let changed = false;
    for (const edge of graph.edges) {
      const wanted = (layer.get(edge.from) ?? 0) + 1;
      if ((layer.get(edge.to) ?? 0) < wanted) {
        layer.set(edge.to, wanted);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return layer;
}

const NODE_W = 170;
const NODE_H = 34;
const GAP_X = 70;
const GAP_Y = 18;

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface RenderOptions {
  selectedEdge?: number;
}

export function renderSvg(graph: DotGraph, options: RenderOptions = {}): string {
  const layers = layerGraph(graph);
  const rows = new Map<string, number>();
  const counts = new Map<number, number>();
  for (const node of graph.nodes) {
    const column = layers.get(node) ?? 0;
    const row = counts.get(column) ?? 0;
    counts.set(column, row + 1);
    rows.set(node, row);
  }
  const position = (node: string) => {
    const column = layers.get(node) ?? 0;
    const row = rows.get(node) ?? 0;
    return {
      x: 10 + column * (NODE_W + GAP_X),
      y: 10 + row * (NODE_H + GAP_Y),
    };
  };
  const maxColumn = Math.max(0, ...graph.nodes.map((n) => layers.get(n) ?? 0));
  const maxRows = Math.max(1, ...[...counts.values()]);
  const width = 20 + (maxColumn + 1) * NODE_W + maxColumn * GAP_X;
  const height = 20 + maxRows * NODE_H + (maxRows - 1) * GAP_Y;

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="7" refY="3" orient="auto">` +
      `<path d="M0,0 L7,3 L0,6 z"/></marker></defs>`,
  ];
  graph.edges.forEach((edge, index) => {
    const a = position(edge.from);
    const b = position(edge.to);
    const selected = options.selectedEdge === index;
    parts.push(
      `<line data-edge="${index}" x1="${a.x + NODE_W}" y1="${a.y + NODE_H / 2}" ` +
        `x2="${b.x}" y2="${b.y + NODE_H / 2}" stroke="${selected ? "#d9480f" : "#333"}" ` +
        `stroke-width="${selected ? 3 : 1.5}" marker-end="url(#arrow)"/>`,
    );
  });
  for (const node of graph.nodes) {
    const { x, y } = position(node);
    parts.push(
      `<g><rect x="${x}" y="${y}" width="${NODE_W}" height="${NODE_H}" rx="6" ` +
        `fill="#eef3fb" stroke="#4a6fa5"/>` +
        `<text x="${x + NODE_W / 2}" y="${y + NODE_H / 2 + 4}" text-anchor="middle" ` +
        `font-size="11">${escapeXml(node)}</text></g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
