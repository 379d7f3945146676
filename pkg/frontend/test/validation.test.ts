import { describe, expect, it } from "vitest";

import { NetworkDoc, emptyNetwork } from "../src/types.js";
import { hasErrors, validateNetwork } from "../src/validation.js";

const SEED = {
  roles: ["seller", "buyer"],
  abstractServices: ["sell product", "buy"],
};

function abDoc(): NetworkDoc {
  return {
    name: "AB-collab",
    participants: [
      { name: "A", roles: ["seller"], abstractServices: [] },
      { name: "B", roles: ["buyer"], abstractServices: [] },
    ],
    relationships: [
      { type: "supplier-customer", p1: "A", p2: "B", duration: "discontinuous" },
    ],
    topology: { power: "equal", duration: "discontinuous" },
    commonGoals: ["buy 100 bolts"],
  };
}

describe("validateNetwork", () => {
  it("accepts the A/B document", () => {
    expect(validateNetwork(abDoc(), SEED)).toEqual([]);
  });

  it("requires at least two participants", () => {
    const doc = abDoc();
    doc.participants = doc.participants.slice(0, 1);
    doc.relationships = [];
    const codes = validateNetwork(doc, SEED).map((d) => d.code);
    expect(codes).toContain("too-few-participants");
    expect(hasErrors(validateNetwork(doc, SEED))).toBe(true);
  });

  it("flags dangling relationship endpoints", () => {
    const doc = abDoc();
    doc.relationships[0]!.p2 = "C";
    const codes = validateNetwork(doc, SEED).map((d) => d.code);
    expect(codes).toContain("dangling-endpoint");
  });

  it("flags self-relationships", () => {
    const doc = abDoc();
    doc.relationships[0]!.p2 = "A";
    const codes = validateNetwork(doc, SEED).map((d) => d.code);
    expect(codes).toContain("self-relationship");
  });

  it("flags unknown roles against the seed", () => {
    const doc = abDoc();
    doc.participants[0]!.roles = ["sheller"];
    const codes = validateNetwork(doc, SEED).map((d) => d.code);
    expect(codes).toContain("unknown-role");
  });

  it("warns on untypable topologies without blocking", () => {
    const doc = abDoc();
    doc.topology = { power: "central", duration: "discontinuous" };
    const diagnostics = validateNetwork(doc, SEED);
    expect(diagnostics).toHaveLength(1);
    expect(diagnostics[0]!.severity).toBe("warning");
    expect(diagnostics[0]!.code).toBe("untypable-topology");
    expect(hasErrors(diagnostics)).toBe(false);
  });

  it("requires a topology and non-empty goals", () => {
    const doc = abDoc();
    doc.topology = null;
    doc.commonGoals = ["  "];
    const codes = validateNetwork(doc, SEED).map((d) => d.code);
    expect(codes).toContain("missing-topology");
    expect(codes).toContain("empty-goal");
  });

  it("flags duplicate participant names case-insensitively", () => {
    const doc = abDoc();
    doc.participants.push({ name: "a", roles: ["seller"], abstractServices: [] });
    const codes = validateNetwork(doc, SEED).map((d) => d.code);
    expect(codes).toContain("duplicate-participant");
  });

  it("an empty fresh document reports only structural errors", () => {
    const diagnostics = validateNetwork(emptyNetwork("x"), SEED);
    expect(diagnostics.map((d) => d.code)).toEqual(["too-few-participants"]);
  });
});
