/** Client-side network validation; mirrors the server's checks and codes so
 * problems surface inline before a round trip. The server stays
 * authoritative: documents are re-validated on upload. */

import {
  Diagnostic,
  DURATIONS,
  NetworkDoc,
  POWERS,
  RELATIONSHIP_TYPES,
  TYPABLE_TOPOLOGIES,
} from "./types.js";

export interface SeedNames {
  roles: string[];
  abstractServices: string[];
}

export function validateNetwork(doc: NetworkDoc, seed?: SeedNames): Diagnostic[] {
  const out: Diagnostic[] = [];
  const error = (code: string, message: string, subject?: string) =>
    out.push({ severity: "error", code, message, subject });
  const warning = (code: string, message: string, subject?: string) =>
    out.push({ severity: "warning", code, message, subject });

  if (!doc.name.trim()) error("missing-name", "network needs a name");

  const names = doc.participants.map((p) => p.name);
  if (doc.participants.length < 2) {
    error("too-few-participants", "a collaboration needs at least two participants");
  }
  const lowered = names.map((n) => n.toLowerCase());
  for (const participant of doc.participants) {
    const name = participant.name;
    if (!name.trim()) {
      error("missing-name", "participant needs a name");
    } else if (lowered.filter((n) => n === name.toLowerCase()).length > 1) {
      error("duplicate-participant", `participant '${name}' declared twice`, name);
    }
    if (participant.roles.length === 0 && participant.abstractServices.length === 0) {
      warning(
        "no-role",
        `participant '${name}' has no role or declared service; nothing will be deduced for it`,
        name,
      );
    }
    if (seed) {
      for (const role of participant.roles) {
        if (!seed.roles.includes(role)) {
          error("unknown-role", `unknown role '${role}'`, name);
        }
      }
      for (const service of participant.abstractServices) {
        if (!seed.abstractServices.includes(service)) {
          error("unknown-abstract-service", `unknown abstract service '${service}'`, name);
        }
      }
    }
  }

  doc.relationships.forEach((relationship, index) => {
    const where = `relationship #${index + 1}`;
    if (!(RELATIONSHIP_TYPES as readonly string[]).includes(relationship.type)) {
      error("bad-relationship-type", `${where}: unknown type '${relationship.type}'`, where);
    }
    if (!(DURATIONS as readonly string[]).includes(relationship.duration)) {
      error("bad-duration", `${where}: unknown duration '${relationship.duration}'`, where);
    }
    for (const endpoint of [relationship.p1, relationship.p2]) {
      if (!names.includes(endpoint)) {
        error(
          "dangling-endpoint",
          `${where}: endpoint '${endpoint}' is not a declared participant`,
          where,
        );
      }
    }
    if (relationship.p1 && relationship.p1 === relationship.p2) {
      error("self-relationship", `${where}: endpoints must differ`, where);
    }
  });

  if (!doc.topology) {
    error("missing-topology", "network needs a topology (power and duration)");
  } else {
    if (!(POWERS as readonly string[]).includes(doc.topology.power)) {
      error("bad-power", `unknown decision-making power '${doc.topology.power}'`);
    }
    if (!(DURATIONS as readonly string[]).includes(doc.topology.duration)) {
      error("bad-duration", `unknown duration '${doc.topology.duration}'`);
    } else if (
      (POWERS as readonly string[]).includes(doc.topology.power) &&
      !(`${doc.topology.power}|${doc.topology.duration}` in TYPABLE_TOPOLOGIES)
    ) {
      warning(
        "untypable-topology",
        `no rule classifies power '${doc.topology.power}' with duration ` +
          `'${doc.topology.duration}'; the topology stays untyped`,
      );
    }
  }

  for (const goal of doc.commonGoals) {
    if (!goal.trim()) error("empty-goal", "common goal descriptions must be non-empty");
  }
  return out;
}

export function hasErrors(diagnostics: Diagnostic[]): boolean {
  return diagnostics.some((d) => d.severity === "error");
}
