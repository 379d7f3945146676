/** Studio application: project list, network canvas, facts inspector,
 * process review with gateway typing, and BPMN download. */

import { ApiClient, ApiRequestError } from "./api.js";
import { layoutGraph } from "./layout.js";
import { clear, el, renderGraphSvg } from "./render.js";
import { GATEWAY_TYPE_OPTIONS, canExport, describeDiagnostics, gatewayChips } from "./review.js";
import * as state from "./state.js";
import {
  DURATIONS,
  Diagnostic,
  NetworkDoc,
  POWERS,
  Project,
  RELATIONSHIP_TYPES,
  SeedEntry,
  emptyNetwork,
  topologyType,
} from "./types.js";
import { hasErrors, validateNetwork } from "./validation.js";

const api = new ApiClient("");
const root = document.getElementById("app") as HTMLElement;

function flash(message: string, severity: "error" | "ok" = "error"): void {
  const banner = document.getElementById("flash") as HTMLElement;
  banner.textContent = message;
  banner.className = `flash flash-${severity}`;
  if (message) setTimeout(() => (banner.textContent = ""), 6000);
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    return await work();
  } catch (error) {
    if (error instanceof ApiRequestError) {
      const details = error.diagnostics.map((d) => d.message).join("; ");
      flash(`${error.code}: ${error.message}${details ? ` — ${details}` : ""}`);
    } else {
      flash(String(error));
    }
    return undefined;
  }
}

function diagnosticsList(diagnostics: Diagnostic[]): HTMLElement {
  const list = el("ul", { class: "diagnostics" });
  for (const d of diagnostics) {
    list.append(el("li", { class: `diag diag-${d.severity}` }, `${d.severity}: ${d.message}`));
  }
  return list;
}

// ------------------------------------------------------------ projects view

async function showProjects(): Promise<void> {
  const projects = (await guard(() => api.listProjects())) ?? [];
  const list = el("div", { class: "project-list" });
  for (const project of projects) {
    const link = el("a", { href: `#project/${project.id}` }, project.name);
    list.append(
      el("div", { class: "project-row" }, link, el("span", { class: "status" }, project.status)),
    );
  }
  const nameInput = el("input", { placeholder: "new collaboration name" });
  const createButton = el("button", {}, "Create project");
  createButton.addEventListener("click", async () => {
    const created = await guard(() => api.createProject(nameInput.value));
    if (created) location.hash = `#project/${created.id}`;
  });
  clear(root).append(
    el("h1", {}, "Collaboration projects"),
    list,
    el("div", { class: "create-row" }, nameInput, createButton),
  );
}

// -------------------------------------------------------------- network tab

interface SeedNames {
  roles: string[];
  abstractServices: string[];
}

function seedNames(entries: SeedEntry[]): SeedNames {
  return {
    roles: entries.filter((e) => e.concepts.includes("Role")).map((e) => e.id),
    abstractServices: entries
      .filter((e) => e.concepts.includes("AbstractService"))
      .map((e) => e.id),
  };
}

function networkEditor(
  project: Project,
  doc: NetworkDoc,
  seed: SeedNames,
  rerender: (doc: NetworkDoc) => void,
): HTMLElement {
  const readonly = project.status !== "draft";
  const pane = el("div", { class: "pane" });
  const diagnostics = validateNetwork(doc, seed);

  const nameInput = el("input", { value: doc.name });
  nameInput.addEventListener("change", () => rerender(state.setName(doc, nameInput.value)));
  pane.append(el("h3", {}, "Network"), el("label", {}, "name ", nameInput));

  const participantsBox = el("div", { class: "participants" });
  for (const participant of doc.participants) {
    const row = el("div", { class: "participant card" });
    row.append(el("strong", {}, participant.name));
    const roleBox = el("span", { class: "chips" }, "roles: ");
    for (const role of seed.roles) {
      const checkbox = el("input", { type: "checkbox" }) as HTMLInputElement;
      checkbox.checked = participant.roles.includes(role);
      checkbox.disabled = readonly;
      checkbox.addEventListener("change", () =>
        rerender(state.toggleRole(doc, participant.name, role)),
      );
      roleBox.append(el("label", { class: "chip" }, checkbox, role));
    }
    row.append(roleBox);
    if (!readonly) {
      const remove = el("button", { class: "danger" }, "remove");
      remove.addEventListener("click", () =>
        rerender(state.removeParticipant(doc, participant.name)),
      );
      row.append(remove);
    }
    participantsBox.append(row);
  }
  const newParticipant = el("input", { placeholder: "participant name" });
  const addParticipant = el("button", {}, "Add participant");
  addParticipant.disabled = readonly;
  addParticipant.addEventListener("click", () => {
    if (newParticipant.value.trim()) {
      rerender(state.addParticipant(doc, newParticipant.value));
    }
  });
  pane.append(
    el("h4", {}, "Participants"),
    participantsBox,
    el("div", {}, newParticipant, addParticipant),
  );

  const relationshipBox = el("div", {});
  doc.relationships.forEach((relationship, index) => {
    const row = el("div", { class: "card" });
    row.append(
      `${relationship.p1} — ${relationship.type} (${relationship.duration}) — ${relationship.p2} `,
    );
    if (!readonly) {
      const remove = el("button", { class: "danger" }, "remove");
      remove.addEventListener("click", () => rerender(state.removeRelationship(doc, index)));
      row.append(remove);
    }
    relationshipBox.append(row);
  });
  const select = (options: readonly string[], cls: string) => {
    const node = el("select", { class: cls });
    for (const option of options) node.append(el("option", { value: option }, option));
    return node;
  };
  const p1 = select(doc.participants.map((p) => p.name), "p1");
  const p2 = select(doc.participants.map((p) => p.name), "p2");
  const relType = select(RELATIONSHIP_TYPES, "rel-type");
  const relDuration = select(DURATIONS, "rel-duration");
  const addRelationship = el("button", {}, "Add relationship");
  addRelationship.disabled = readonly;
  addRelationship.addEventListener("click", () =>
    rerender(
      state.addRelationship(doc, {
        type: relType.value,
        p1: p1.value,
        p2: p2.value,
        duration: relDuration.value,
      }),
    ),
  );
  pane.append(
    el("h4", {}, "Relationships"),
    relationshipBox,
    el("div", {}, p1, relType, relDuration, p2, addRelationship),
  );

  const power = select(POWERS, "power");
  power.value = doc.topology?.power ?? "equal";
  const duration = select(DURATIONS, "duration");
  duration.value = doc.topology?.duration ?? "discontinuous";
  const onTopology = () => rerender(state.setTopology(doc, power.value, duration.value));
  power.addEventListener("change", onTopology);
  duration.addEventListener("change", onTopology);
  power.disabled = duration.disabled = readonly;
  const derived = topologyType(doc.topology);
  pane.append(
    el("h4", {}, "Topology"),
    el("div", {}, "power ", power, " duration ", duration,
      el("span", { class: "derived" }, derived ? ` deduced type: ${derived}` : " (untypable)")),
  );

  const goalsBox = el("div", {});
  doc.commonGoals.forEach((goal, index) => {
    const row = el("div", { class: "card" }, goal, " ");
    if (!readonly) {
      const remove = el("button", { class: "danger" }, "remove");
      remove.addEventListener("click", () => rerender(state.removeGoal(doc, index)));
      row.append(remove);
    }
    goalsBox.append(row);
  });
  const goalInput = el("input", { placeholder: "e.g. buy 100 bolts" });
  const addGoal = el("button", {}, "Add goal");
  addGoal.disabled = readonly;
  addGoal.addEventListener("click", () => {
    if (goalInput.value.trim()) rerender(state.addGoal(doc, goalInput.value));
  });
  pane.append(el("h4", {}, "Common goals"), goalsBox, el("div", {}, goalInput, addGoal));

  pane.append(el("h4", {}, "Validation"), diagnosticsList(diagnostics));

  const save = el("button", { class: "primary" }, "Save network");
  save.disabled = readonly || hasErrors(diagnostics);
  save.addEventListener("click", async () => {
    const saved = await guard(() => api.saveNetwork(project.id, doc));
    if (saved) flash("network saved", "ok");
  });
  const deduce = el("button", { class: "primary" }, "Run deduction");
  deduce.disabled = project.status !== "draft" && project.status !== "deduced";
  deduce.addEventListener("click", async () => {
    await guard(async () => {
      if (project.status === "draft") await api.saveNetwork(project.id, doc);
      const report = await api.deduce(project.id);
      flash(`deduction done in ${report.iterations} iterations`, "ok");
      await showProject(project.id, "facts");
    });
  });
  if (!readonly) pane.append(el("div", { class: "actions" }, save, deduce));
  else if (project.status === "deduced") pane.append(el("div", { class: "actions" }, deduce));
  return pane;
}

// ---------------------------------------------------------------- facts tab

async function factsPane(project: Project): Promise<HTMLElement> {
  const pane = el("div", { class: "pane" });
  const provenance = el("select", {},
    el("option", { value: "" }, "all facts"),
    el("option", { value: "asserted" }, "asserted"),
    el("option", { value: "derived" }, "derived"));
  const rule = el("input", { placeholder: "rule id (e.g. GR3a)" });
  const table = el("table", { class: "facts" });
  const refresh = async () => {
    const facts =
      (await guard(() =>
        api.facts(project.id, {
          provenance: provenance.value || undefined,
          rule: rule.value.trim() || undefined,
        }),
      )) ?? [];
    clear(table).append(
      el("tr", {}, el("th", {}, "subject"), el("th", {}, "predicate"),
        el("th", {}, "object"), el("th", {}, "provenance")),
    );
    for (const fact of facts) {
      table.append(
        el("tr", {},
          el("td", {}, fact.subject),
          el("td", {}, fact.predicate),
          el("td", {}, fact.object.kind === "literal" ? `"${fact.object.value}"` : fact.object.value),
          el("td", { class: "prov" }, fact.provenance)),
      );
    }
  };
  provenance.addEventListener("change", refresh);
  rule.addEventListener("change", refresh);
  await refresh();
  const assembleButton = el("button", { class: "primary" }, "Assemble process");
  assembleButton.disabled = project.status !== "deduced";
  assembleButton.addEventListener("click", async () => {
    const graph = await guard(() => api.assemble(project.id));
    if (graph) await showProject(project.id, "process");
  });
  pane.append(
    el("h3", {}, "Deduced knowledge"),
    el("div", { class: "filters" }, provenance, rule),
    table,
    el("div", { class: "actions" }, assembleButton),
  );
  return pane;
}

// -------------------------------------------------------------- process tab

async function processPane(project: Project): Promise<HTMLElement> {
  const pane = el("div", { class: "pane" });
  const graph = await guard(() => api.process(project.id));
  if (!graph) {
    pane.append(el("p", {}, "Run deduction and assemble the process first."));
    return pane;
  }
  const diagnostics = (await guard(() => api.diagnostics(project.id))) ?? [];

  pane.append(el("h3", {}, `Process: ${graph.name}`));
  pane.append(renderGraphSvg(layoutGraph(graph), null, () => undefined));

  const chipsBox = el("div", { class: "gateway-chips" });
  for (const chip of gatewayChips(graph)) {
    const picker = el("select", {}, el("option", { value: "unset" }, "choose type…"));
    for (const option of chip.options) picker.append(el("option", { value: option }, option));
    picker.value = chip.assigned ? chip.type : "unset";
    picker.addEventListener("change", async () => {
      if (picker.value === "unset") return;
      const result = await guard(() => api.assignGateway(project.id, chip.id, picker.value));
      if (result) {
        flash(`gateway typed; project is ${result.status}`, "ok");
        await showProject(project.id, "process");
      }
    });
    chipsBox.append(
      el("div", { class: `chip-card ${chip.assigned ? "assigned" : "unassigned"}` },
        el("span", { class: "direction" }, chip.direction),
        el("code", {}, chip.id),
        picker),
    );
  }
  pane.append(el("h4", {}, "Gateways"), chipsBox);
  pane.append(
    el("div", { class: "diag-strip" }, describeDiagnostics(diagnostics)),
  );

  const exportButton = el("button", { class: "primary" }, "Export BPMN");
  exportButton.disabled = !canExport(diagnostics);
  exportButton.addEventListener("click", async () => {
    const data = await guard(() => api.exportBpmn(project.id));
    if (data) {
      flash("exported; download is ready", "ok");
      await showProject(project.id, "process");
    }
  });
  const actions = el("div", { class: "actions" }, exportButton);
  if (project.status === "exported") {
    actions.append(
      el("a", { href: `/v1/projects/${project.id}/export.bpmn`, download: `${project.id}.bpmn`,
        class: "download" }, "Download .bpmn"),
    );
  }
  pane.append(actions);
  return pane;
}

// ------------------------------------------------------------- project view

async function showProject(projectId: string, tab = "network"): Promise<void> {
  const project = await guard(() => api.getProject(projectId));
  if (!project) return showProjects();
  const seed = seedNames((await guard(() => api.seedEntries())) ?? []);

  let doc: NetworkDoc;
  try {
    doc = await api.getNetwork(project.id);
  } catch {
    doc = emptyNetwork(project.name);
  }

  const header = el("div", { class: "project-header" },
    el("a", { href: "#" }, "« projects"),
    el("h2", {}, project.name),
    el("span", { class: `status status-${project.status}` }, project.status));

  const tabs = el("nav", { class: "tabs" });
  for (const name of ["network", "facts", "process"]) {
    const button = el("button", { class: name === tab ? "tab active" : "tab" }, name);
    button.addEventListener("click", () => void showProject(projectId, name));
    tabs.append(button);
  }

  const body = el("div", { class: "tab-body" });
  if (tab === "facts" && project.status !== "draft") {
    body.append(await factsPane(project));
  } else if (tab === "process" && project.status !== "draft") {
    body.append(await processPane(project));
  } else {
    const rerender = (next: NetworkDoc) => {
      doc = next;
      clear(body).append(networkEditor(project, doc, seed, rerender));
    };
    body.append(networkEditor(project, doc, seed, rerender));
  }
  clear(root).append(header, tabs, body);
}

// -------------------------------------------------------------------- route

function route(): void {
  const hash = location.hash.replace(/^#/, "");
  if (hash.startsWith("project/")) {
    void showProject(hash.slice("project/".length));
  } else {
    void showProjects();
  }
}

window.addEventListener("hashchange", route);
route();
