/** Process review model: gateway chips with their type pickers and the
 * export gate. Only the four supported gateway types are ever offered, and
 * export stays disabled until the completeness diagnostics are empty. */

import { Diagnostic, GatewayView, ProcessGraphView } from "./types.js";

export const GATEWAY_TYPE_OPTIONS = [
  "parallel",
  "event-based-exclusive",
  "data-based-exclusive",
  "data-based-inclusive",
] as const;

export type GatewayTypeOption = (typeof GATEWAY_TYPE_OPTIONS)[number];

export interface GatewayChip {
  id: string;
  direction: GatewayView["direction"];
  type: string;
  assigned: boolean;
  options: readonly string[];
}

export function gatewayChips(graph: ProcessGraphView): GatewayChip[] {
  return graph.gateways
    .slice()
    .sort((a, b) => a.id.localeCompare(b.id))
    .map((gateway) => ({
      id: gateway.id,
      direction: gateway.direction,
      type: gateway.type,
      assigned: gateway.type !== "unset",
      options: GATEWAY_TYPE_OPTIONS,
    }));
}

export function canExport(diagnostics: Diagnostic[]): boolean {
  return diagnostics.length === 0;
}

export function untypedCount(graph: ProcessGraphView): number {
  return graph.gateways.filter((g) => g.type === "unset").length;
}

export function describeDiagnostics(diagnostics: Diagnostic[]): string {
  if (diagnostics.length === 0) return "complete: ready to export";
  return diagnostics.map((d) => `${d.severity}: ${d.message}`).join("; ");
}
