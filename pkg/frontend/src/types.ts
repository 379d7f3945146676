/** JSON shapes exchanged with the /v1 API (mirrors of the file formats). */

export interface ParticipantSpec {
  name: string;
  roles: string[];
  abstractServices: string[];
}

export interface RelationshipSpec {
  type: string;
  p1: string;
  p2: string;
  duration: string;
}

export interface TopologySpec {
  power: string;
  duration: string;
}

export interface NetworkDoc {
  name: string;
  participants: ParticipantSpec[];
  relationships: RelationshipSpec[];
  topology: TopologySpec | null;
  commonGoals: string[];
}

export interface Diagnostic {
  severity: "error" | "warning";
  code: string;
  message: string;
  subject?: string;
}

export interface Project {
  id: string;
  name: string;
  status: "draft" | "deduced" | "assembled" | "complete" | "exported";
  seed: string;
}

export interface FactObject {
  kind: "id" | "literal";
  value: string;
}

export interface FactView {
  subject: string;
  predicate: string;
  object: FactObject;
  provenance: string;
}

export interface DeductionReport {
  iterations: number;
  createdInstances: string[];
  factsByRule: Record<string, FactView[]>;
}

export interface TaskView {
  id: string;
  service: string;
  pool: string;
  lane: string;
  inputs: string[];
  outputs: string[];
}

export interface OccurrenceView {
  id: string;
  dependency: string;
  coordinator: string;
  from: string;
  to: string;
  resource: string;
  alternates: string[];
}

export interface GatewayView {
  id: string;
  direction: "diverging" | "converging";
  type: string;
}

export interface EventView {
  id: string;
  kind: "start" | "end";
}

export interface FlowView {
  from: string;
  to: string;
}

export interface ProcessGraphView {
  name: string;
  partnerPools: Record<string, string[]>;
  mediationLanes: string[];
  tasks: TaskView[];
  occurrences: OccurrenceView[];
  gateways: GatewayView[];
  events: EventView[];
  seqFlows: FlowView[];
  msgFlows: FlowView[];
}

export interface GatewayPatchResult {
  gateway: string;
  type: string;
  status: Project["status"];
  diagnostics: Diagnostic[];
}

export interface SeedEntry {
  id: string;
  label: string;
  concepts: string[];
}

export interface ApiError {
  code: string;
  message: string;
  diagnostics?: Diagnostic[];
}

export const RELATIONSHIP_TYPES = [
  "competition",
  "supplier-customer",
  "group-of-interest",
] as const;

export const DURATIONS = ["continuous", "discontinuous"] as const;

export const POWERS = ["central", "equal", "hierarchical"] as const;

/** Power/duration pairs the deduction rules can classify, and their type. */
export const TYPABLE_TOPOLOGIES: Record<string, string> = {
  "central|continuous": "star",
  "equal|discontinuous": "P2P",
  "hierarchical|continuous": "chain",
};

export function topologyType(topology: TopologySpec | null): string | null {
  if (!topology) return null;
  return TYPABLE_TOPOLOGIES[`${topology.power}|${topology.duration}`] ?? null;
}

export function emptyNetwork(name: string): NetworkDoc {
  return {
    name,
    participants: [],
    relationships: [],
    topology: { power: "equal", duration: "discontinuous" },
    commonGoals: [],
  };
}
