/** Minimal force-directed layout for the partnerships view.
 *
 * The table next to it is authoritative; the graph is a navigational
 * aid, so a fixed-iteration spring simulation with a deterministic
 * initial ring is plenty.
 */

export interface GraphNode {
  id: string;
  x: number;
  y: number;
}

export interface GraphEdge {
  from: string;
  to: string;
  weight: number;
}

export interface GraphLayout {
  nodes: GraphNode[];
  edges: GraphEdge[];
  width: number;
  height: number;
}

export function layoutPartnerships(
  query: string,
  partners: Record<string, [string, string][]>,
  width = 640,
  height = 360,
): GraphLayout {
  const names = Object.keys(partners).sort();
  const nodes: GraphNode[] = [{ id: query, x: width / 2, y: height / 2 }];
  names.forEach((name, i) => {
    const angle = (2 * Math.PI * i) / Math.max(names.length, 1);
    nodes.push({
      id: name,
      x: width / 2 + Math.cos(angle) * width * 0.3,
      y: height / 2 + Math.sin(angle) * height * 0.3,
    });
  });
  const edges: GraphEdge[] = names.map((name) => ({
    from: query,
    to: name,
    weight: partners[name].length,
  }));

  for (let iteration = 0; iteration < 120; iteration++) {
    for (let i = 1; i < nodes.length; i++) {
      let fx = 0;
      let fy = 0;
      for (let j = 0; j < nodes.length; j++) {
        if (i === j) continue;
        const dx = nodes[i].x - nodes[j].x;
        const dy = nodes[i].y - nodes[j].y;
        const dist2 = Math.max(dx * dx + dy * dy, 25);
        fx += (dx / dist2) * 2400;
        fy += (dy / dist2) * 2400;
      }
      const dx = nodes[0].x - nodes[i].x;
      const dy = nodes[0].y - nodes[i].y;
      fx += dx * 0.02;
      fy += dy * 0.02;
      nodes[i].x = Math.min(width - 20, Math.max(20, nodes[i].x + fx * 0.05));
      nodes[i].y = Math.min(height - 20, Math.max(20, nodes[i].y + fy * 0.05));
    }
  }
  return { nodes, edges, width, height };
}

export function drawGraph(canvas: HTMLCanvasElement, layout: GraphLayout): void {
  canvas.width = layout.width;
  canvas.height = layout.height;
  let ctx: CanvasRenderingContext2D | null = null;
  try {
    ctx = canvas.getContext("2d");
  } catch {
    ctx = null; // headless DOMs have no 2d context; the table stays authoritative
  }
  if (!ctx) return;
  ctx.clearRect(0, 0, layout.width, layout.height);
  const byId = new Map(layout.nodes.map((n) => [n.id, n]));
  for (const edge of layout.edges) {
    const a = byId.get(edge.from);
    const b = byId.get(edge.to);
    if (!a || !b) continue;
    ctx.strokeStyle = "#2c3442";
    ctx.lineWidth = Math.min(1 + edge.weight, 6);
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
  }
  layout.nodes.forEach((node, i) => {
    ctx.fillStyle = i === 0 ? "#62a0ea" : "#8b95a5";
    ctx.beginPath();
    ctx.arc(node.x, node.y, i === 0 ? 7 : 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#d7dde6";
    ctx.font = "11px sans-serif";
    ctx.fillText(node.id, node.x + 8, node.y + 3);
  });
}
