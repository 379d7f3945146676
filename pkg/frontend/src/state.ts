/** Network canvas state: every edit goes through a pure reducer returning a
 * fresh document, so the canvas can never hold state the document cannot
 * express. */

import { NetworkDoc, ParticipantSpec, RelationshipSpec } from "./types.js";

function clone(doc: NetworkDoc): NetworkDoc {
  return JSON.parse(JSON.stringify(doc)) as NetworkDoc;
}

export function addParticipant(doc: NetworkDoc, name: string): NetworkDoc {
  const next = clone(doc);
  next.participants.push({ name: name.trim(), roles: [], abstractServices: [] });
  return next;
}

export function removeParticipant(doc: NetworkDoc, name: string): NetworkDoc {
  const next = clone(doc);
  next.participants = next.participants.filter((p) => p.name !== name);
  next.relationships = next.relationships.filter(
    (r) => r.p1 !== name && r.p2 !== name,
  );
  return next;
}

export function renameParticipant(doc: NetworkDoc, from: string, to: string): NetworkDoc {
  const next = clone(doc);
  for (const participant of next.participants) {
    if (participant.name === from) participant.name = to.trim();
  }
  for (const relationship of next.relationships) {
    if (relationship.p1 === from) relationship.p1 = to.trim();
    if (relationship.p2 === from) relationship.p2 = to.trim();
  }
  return next;
}

function participant(doc: NetworkDoc, name: string): ParticipantSpec | undefined {
  return doc.participants.find((p) => p.name === name);
}

export function toggleRole(doc: NetworkDoc, name: string, role: string): NetworkDoc {
  const next = clone(doc);
  const target = participant(next, name);
  if (!target) return next;
  const index = target.roles.indexOf(role);
  if (index >= 0) target.roles.splice(index, 1);
  else target.roles.push(role);
  return next;
}

export function toggleAbstractService(
  doc: NetworkDoc,
  name: string,
  service: string,
): NetworkDoc {
  const next = clone(doc);
  const target = participant(next, name);
  if (!target) return next;
  const index = target.abstractServices.indexOf(service);
  if (index >= 0) target.abstractServices.splice(index, 1);
  else target.abstractServices.push(service);
  return next;
}

export function addRelationship(doc: NetworkDoc, spec: RelationshipSpec): NetworkDoc {
  const next = clone(doc);
  next.relationships.push({ ...spec });
  return next;
}

export function removeRelationship(doc: NetworkDoc, index: number): NetworkDoc {
  const next = clone(doc);
  next.relationships.splice(index, 1);
  return next;
}

export function setTopology(doc: NetworkDoc, power: string, duration: string): NetworkDoc {
  const next = clone(doc);
  next.topology = { power, duration };
  return next;
}

export function addGoal(doc: NetworkDoc, description: string): NetworkDoc {
  const next = clone(doc);
  next.commonGoals.push(description);
  return next;
}

export function removeGoal(doc: NetworkDoc, index: number): NetworkDoc {
  const next = clone(doc);
  next.commonGoals.splice(index, 1);
  return next;
}

export function setName(doc: NetworkDoc, name: string): NetworkDoc {
  const next = clone(doc);
  next.name = name.trim();
  return next;
}
