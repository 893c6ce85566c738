import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { DEBOUNCE_MS, SessionStore, formatProbability, type Scheduler } from "../src/store.js";
import { FakeService, numbersIn } from "./fake_service.js";

/** Manually stepped scheduler so tests control the debounce clock. */
class ManualScheduler {
  private queue: { fn: () => void; at: number; cancelled: boolean }[] = [];
  private now = 0;

  schedule: Scheduler = (fn, delayMs) => {
    const entry = { fn, at: this.now + delayMs, cancelled: false };
    this.queue.push(entry);
    return () => {
      entry.cancelled = true;
    };
  };

  async advance(ms: number): Promise<void> {
    this.now += ms;
    const due = this.queue.filter((e) => !e.cancelled && e.at <= this.now);
    this.queue = this.queue.filter((e) => !due.includes(e));
    for (const entry of due) entry.fn();
    await flush();
  }
}

/** Drain the microtask queue (store methods are async). */
async function flush(): Promise<void> {
  for (let i = 0; i < 20; i++) await Promise.resolve();
}

function makeStore(service: FakeService): { store: SessionStore; scheduler: ManualScheduler } {
  const scheduler = new ManualScheduler();
  const api = new ApiClient("", service.fetch);
  const store = new SessionStore(api, scheduler.schedule);
  return { store, scheduler };
}

describe("load_case", () => {
  it("renders every node and the baseline risk", async () => {
    const service = new FakeService();
    const { store } = makeStore(service);
    await store.load();
    await flush();

    const rows = store.treeRows();
    expect(rows.length).toBe(2); // node count equals GET /api/case node count
    expect(rows[0]!.id).toBe("G1");
    expect(rows[0]!.glyph).toBeTruthy();
    const panel = store.riskPanel();
    expect(panel).not.toBeNull();
    expect(panel!.overallRisk).toBeCloseTo(0.001, 12);
    expect(formatProbability(panel!.overallRisk)).toBe("0.001");
    expect(panel!.outcomes[0]!.verdict).toBe("pass");
  });

  it("shows an error banner and no risk panel for an invalid case", async () => {
    const service = new FakeService({ invalidCase: true });
    const { store } = makeStore(service);
    await store.load();
    await flush();

    expect(store.banner).toContain("INVALID_CASE");
    expect(store.riskPanel()).toBeNull();
    expect(store.treeRows().length).toBe(2); // the outline still renders
  });
});

describe("what_if", () => {
  it("slider to 0.9 displays risk 0.1", async () => {
    const service = new FakeService();
    const { store, scheduler } = makeStore(service);
    await store.load();
    await flush();

    expect(store.whatIf("Sn1", 0.9)).toBe(true);
    await scheduler.advance(DEBOUNCE_MS);

    const panel = store.riskPanel()!;
    expect(panel.overallRisk).toBeCloseTo(0.1, 12);
    expect(formatProbability(panel.overallRisk)).toBe("0.1");
    // The verdict badge flipped exactly when the engine's verdict flipped.
    expect(panel.outcomes[0]!.verdict).toBe("fail");
  });

  it("returning the slider to baseline reproduces the baseline estimate", async () => {
    const service = new FakeService();
    const { store, scheduler } = makeStore(service);
    await store.load();
    await flush();
    const baseline = store.lastEstimateText;

    store.whatIf("Sn1", 0.9);
    await scheduler.advance(DEBOUNCE_MS);
    store.whatIf("Sn1", 0.999);
    await scheduler.advance(DEBOUNCE_MS);

    expect(store.riskPanel()!.overallRisk).toBeCloseTo(0.001, 12);
    expect(store.riskPanel()!.outcomes[0]!.verdict).toBe("pass");
    const again = JSON.parse(store.lastEstimateText!);
    expect(again).toEqual(JSON.parse(baseline!));
  });

  it("rejects out-of-range input at the control", async () => {
    const service = new FakeService();
    const { store } = makeStore(service);
    await store.load();
    await flush();
    const before = service.log.length;
    expect(store.whatIf("Sn1", 1.5)).toBe(false);
    expect(store.whatIf("Sn1", -0.1)).toBe(false);
    expect(service.log.length).toBe(before); // nothing sent
  });

  it("debounces rapid slider input into one request", async () => {
    const service = new FakeService();
    const { store, scheduler } = makeStore(service);
    await store.load();
    await flush();

    const evaluatesBefore = service.log.filter((r) => r.path === "/api/evaluate").length;
    store.whatIf("Sn1", 0.5);
    await scheduler.advance(50);
    store.whatIf("Sn1", 0.6);
    await scheduler.advance(50);
    store.whatIf("Sn1", 0.7);
    await scheduler.advance(DEBOUNCE_MS);
    const evaluatesAfter = service.log.filter((r) => r.path === "/api/evaluate").length;
    expect(evaluatesAfter - evaluatesBefore).toBe(1);
    const last = service.log[service.log.length - 1]!;
    expect(last.body).toEqual({ overrides: { Sn1: 0.7 } });
  });

  it("stale responses lose to newer ones (sequence numbers)", async () => {
    const service = new FakeService();
    const { store } = makeStore(service);
    await store.load();
    await flush();

    // Hold the first response until after the second has landed.
    const gate: { release: (() => void) | null } = { release: null };
    const original = service.fetch;
    let intercepted = 0;
    const gated: typeof service.fetch = async (url, init) => {
      if (url.endsWith("/api/evaluate") && intercepted++ === 0) {
        await new Promise<void>((resolve) => {
          gate.release = resolve;
        });
      }
      return original(url, init);
    };
    const gatedStore = new SessionStore(new ApiClient("", gated), (fn) => {
      fn();
      return () => {};
    });
    // load()'s baseline evaluate is the gated first request: release it
    // while load is still in flight, then let it settle.
    const loading = gatedStore.load();
    while (gate.release === null) {
      await new Promise((resolve) => setTimeout(resolve, 1));
    }
    gate.release();
    await loading;
    await flush();

    const slow = gatedStore.whatIf("Sn1", 0.5); // in-flight, will resolve late
    const fast = gatedStore.whatIf("Sn1", 0.9); // resolves first
    expect(slow && fast).toBe(true);
    await flush();
    expect(gatedStore.riskPanel()!.overallRisk).toBeCloseTo(0.1, 12);
  });
});

describe("challenge_panel", () => {
  it("conceding a challenge on a conjunctive leaf drives displayed risk to 1", async () => {
    const service = new FakeService();
    const { store } = makeStore(service);
    await store.load();
    await flush();

    expect(store.challengePanel()[0]!.blocking).toBe(true);
    // Blocking badge shows on the target node.
    expect(store.treeRows().find((r) => r.id === "Sn1")!.challenged).toBe(true);

    await store.concede("R1");
    await flush();
    expect(store.riskPanel()!.overallRisk).toBe(1.0);
    expect(store.invalidated.has("Sn1")).toBe(true);
    expect(store.treeRows().find((r) => r.id === "Sn1")!.invalidated).toBe(true);
    // The invalidate request actually went to the service.
    expect(service.log.some((r) => r.path === "/api/invalidate")).toBe(true);
  });

  it("a 404 from the service leaves state unchanged and shows a banner", async () => {
    const service = new FakeService();
    const { store } = makeStore(service);
    await store.load();
    await flush();
    const panelBefore = JSON.stringify(store.riskPanel());

    // Rewire the only challenge at an unknown node.
    store.challenges[0]!.target = "GHOST";
    await store.concede("R1");
    await flush();

    expect(store.banner).toContain("UNKNOWN_REFERENCE");
    expect(JSON.stringify(store.riskPanel())).toBe(panelBefore);
    expect(store.invalidated.size).toBe(0);
  });

  it("rebutted challenges show no blocking badge", async () => {
    const service = new FakeService();
    const { store } = makeStore(service);
    await store.load();
    await flush();
    store.challenges[0]!.status = "rebutted";
    expect(store.challengePanel()[0]!.blocking).toBe(false);
    expect(store.treeRows().find((r) => r.id === "Sn1")!.challenged).toBe(false);
  });
});

describe("reset", () => {
  it("reproduces the baseline evaluate response byte-for-byte", async () => {
    const service = new FakeService();
    const { store, scheduler } = makeStore(service);
    await store.load();
    await flush();
    const baselineBytes = store.baselineEstimateText!;

    store.whatIf("Sn1", 0.42);
    await scheduler.advance(DEBOUNCE_MS);
    await store.concede("R1");
    await flush();
    expect(store.lastEstimateText).not.toBe(baselineBytes);

    await store.reset();
    await flush();
    expect(store.overrides.size).toBe(0);
    expect(store.invalidated.size).toBe(0);
    expect(store.lastEstimateText).toBe(baselineBytes);
  });
});

describe("traceability", () => {
  it("every displayed number originated from a service response", async () => {
    // The rig returns numbers unrelated to any local arithmetic: if the UI
    // computed 1 - 0.9 itself, the panel would show 0.1, not the sentinels.
    const rigged = {
      schema_version: 1,
      root_validity: 0.777,
      overall_risk: 0.123,
      node_validity: { G1: 0.777, Sn1: 0.456 },
      outcome_risks: {
        G1: { severity: "sev1", risk: 0.123, threshold: 0.001, verdict: "fail" as const },
      },
      findings: [],
    };
    const service = new FakeService({ riggedEstimate: rigged });
    const { store, scheduler } = makeStore(service);
    await store.load();
    await flush();
    store.whatIf("Sn1", 0.9);
    await scheduler.advance(DEBOUNCE_MS);

    const panel = store.riskPanel()!;
    expect(panel.overallRisk).toBe(0.123);
    expect(formatProbability(panel.overallRisk)).toBe("0.123");

    // Every number in the rendered view models appears in some logged
    // service response (displayed numbers are lifted, never derived).
    const served = numbersIn([
      rigged,
      ...service.log, // includes bodies the client sent; harmless superset
    ]);
    served.add(0.123);
    const displayed = new Set<number>();
    numbersIn(store.riskPanel(), displayed);
    for (const row of store.treeRows()) {
      if (row.validity !== null) displayed.add(row.validity);
    }
    const wire = numbersIn([rigged, service.log]);
    for (const value of displayed) {
      expect(wire.has(value), `displayed ${value} must come from the wire`).toBe(true);
    }
    // And the value shown is provably the service's, not local arithmetic.
    expect(panel.overallRisk).not.toBeCloseTo(0.1, 6);
  });
});

describe("state recoverability", () => {
  it("reloading with the same (baseline, overrides, invalidated) triple reproduces the panels", async () => {
    const service = new FakeService();
    const { store, scheduler } = makeStore(service);
    await store.load();
    await flush();
    store.whatIf("Sn1", 0.8);
    await scheduler.advance(DEBOUNCE_MS);
    await store.invalidateNode("G1");
    await flush();
    store.toggleCollapse("G1");
    const triple = store.stateTriple();
    const panels = JSON.stringify([store.riskPanel(), store.treeRows(), store.matrixView()]);

    // Fresh session against the same service content.
    const service2 = new FakeService();
    const { store: store2 } = makeStore(service2);
    await store2.load();
    await flush();
    await store2.restore(triple);
    await flush();

    expect(store2.stateTriple()).toEqual(triple);
    expect(JSON.stringify([store2.riskPanel(), store2.treeRows(), store2.matrixView()])).toBe(panels);
  });
});

describe("matrix view", () => {
  it("highlights the cell the current outcome risk lands in", async () => {
    const service = new FakeService();
    const { store, scheduler } = makeStore(service);
    await store.load();
    await flush();

    let cells = store.matrixView().flat();
    expect(cells.find((c) => c.likelihood === "rare")!.hits).toEqual(["G1"]);

    store.whatIf("Sn1", 0.9); // risk 0.1 -> "plausible"
    await scheduler.advance(DEBOUNCE_MS);
    cells = store.matrixView().flat();
    expect(cells.find((c) => c.likelihood === "plausible")!.hits).toEqual(["G1"]);
    expect(cells.find((c) => c.likelihood === "rare")!.hits).toEqual([]);
  });
});
