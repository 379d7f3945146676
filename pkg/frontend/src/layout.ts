/** Schematic auto-layout for the pool/lane/node view.
 *
 * Mediation nodes are ranked by longest-path depth from the flow sources
 * (cycles broken on visit order), ranks become columns; partner tasks line
 * up with the occurrences they exchange messages with. Coordinates are
 * abstract units for the SVG renderer.
 */

import { ProcessGraphView } from "./types.js";

export interface NodeBox {
  id: string;
  kind: "task" | "occurrence" | "gateway" | "event";
  label: string;
  pool: string;
  lane: string;
  x: number;
  y: number;
}

export interface LaneBand {
  pool: string;
  lane: string;
  y: number;
}

export interface EdgeLine {
  from: string;
  to: string;
  kind: "seq" | "msg";
}

export interface GraphLayout {
  columns: number;
  nodes: NodeBox[];
  lanes: LaneBand[];
  edges: EdgeLine[];
}

function mediationRanks(graph: ProcessGraphView): Map<string, number> {
  const nodes = [
    ...graph.occurrences.map((o) => o.id),
    ...graph.gateways.map((g) => g.id),
    ...graph.events.map((e) => e.id),
  ].sort();
  const succ = new Map<string, string[]>();
  const indegree = new Map<string, number>(nodes.map((n) => [n, 0]));
  for (const flow of graph.seqFlows) {
    succ.set(flow.from, [...(succ.get(flow.from) ?? []), flow.to]);
    indegree.set(flow.to, (indegree.get(flow.to) ?? 0) + 1);
  }
  const rank = new Map<string, number>();
  const queue = nodes.filter((n) => (indegree.get(n) ?? 0) === 0);
  for (const n of queue) rank.set(n, 0);
  const seen = new Set<string>(queue);
  while (queue.length) {
    const node = queue.shift() as string;
    for (const next of (succ.get(node) ?? []).sort()) {
      const depth = (rank.get(node) ?? 0) + 1;
      if (!rank.has(next) || depth > (rank.get(next) as number)) {
        if (!seen.has(next) || depth <= nodes.length) rank.set(next, depth);
      }
      if (!seen.has(next)) {
        seen.add(next);
        queue.push(next);
      }
    }
  }
  let fallback = 0;
  for (const node of nodes) {
    if (!rank.has(node)) rank.set(node, fallback++ % Math.max(nodes.length, 1));
  }
  return rank;
}

export function layoutGraph(graph: ProcessGraphView): GraphLayout {
  const ranks = mediationRanks(graph);
  const lanes: LaneBand[] = [];
  const nodes: NodeBox[] = [];
  let y = 0;

  const partnerNames = Object.keys(graph.partnerPools).sort();
  const mediationIndex = Math.ceil(partnerNames.length / 2);
  const poolOrder = [
    ...partnerNames.slice(0, mediationIndex),
    "__mediation__",
    ...partnerNames.slice(mediationIndex),
  ];

  const taskColumn = new Map<string, number>();
  for (const occ of graph.occurrences) {
    const column = ranks.get(occ.id) ?? 0;
    for (const flow of graph.msgFlows) {
      if (flow.from !== occ.id && flow.to !== occ.id) continue;
      const task = flow.from === occ.id ? flow.to : flow.from;
      taskColumn.set(task, Math.max(taskColumn.get(task) ?? 0, column));
    }
  }

  for (const pool of poolOrder) {
    if (pool === "__mediation__") {
      for (const lane of graph.mediationLanes) {
        lanes.push({ pool: "mediation", lane, y });
        for (const occ of graph.occurrences.filter((o) => o.coordinator === lane)) {
          nodes.push({
            id: occ.id,
            kind: "occurrence",
            label: `${occ.coordinator}: ${occ.resource}`,
            pool: "mediation",
            lane,
            x: ranks.get(occ.id) ?? 0,
            y,
          });
        }
        y += 1;
      }
      // gateways and events sit on a control band under the mediation lanes
      lanes.push({ pool: "mediation", lane: "flow control", y });
      for (const gateway of graph.gateways) {
        nodes.push({
          id: gateway.id,
          kind: "gateway",
          label: gateway.type === "unset" ? "?" : gateway.type,
          pool: "mediation",
          lane: "flow control",
          x: ranks.get(gateway.id) ?? 0,
          y,
        });
      }
      for (const event of graph.events) {
        nodes.push({
          id: event.id,
          kind: "event",
          label: event.kind,
          pool: "mediation",
          lane: "flow control",
          x: ranks.get(event.id) ?? 0,
          y,
        });
      }
      y += 1;
      continue;
    }
    for (const lane of graph.partnerPools[pool] ?? []) {
      lanes.push({ pool, lane, y });
      let fallback = 0;
      for (const task of graph.tasks.filter(
        (t) => t.pool === pool && t.lane === lane,
      )) {
        nodes.push({
          id: task.id,
          kind: "task",
          label: task.service,
          pool,
          lane,
          x: taskColumn.get(task.id) ?? fallback++,
          y,
        });
      }
      y += 1;
    }
  }

  const edges: EdgeLine[] = [
    ...graph.seqFlows.map((f) => ({ from: f.from, to: f.to, kind: "seq" as const })),
    ...graph.msgFlows.map((f) => ({ from: f.from, to: f.to, kind: "msg" as const })),
  ];
  const columns = Math.max(1, ...nodes.map((n) => n.x + 1));
  return { columns, nodes, lanes, edges };
}
