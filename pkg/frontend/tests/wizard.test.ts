import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { LinkBuilder } from "../src/state";
import { WizardController } from "../src/wizard";
import { FakeServer, MemoryStorage } from "./fake-server";

function setup() {
  const server = new FakeServer();
  const storage = new MemoryStorage();
  const api = new ApiClient("http://test", server.fetch);
  return { server, storage, api, controller: new WizardController(api, storage) };
}

async function reachCreation(controller: WizardController) {
  await controller.start();
  await controller.answerGate("more A", "more B");
  await controller.sendDemographics(Array(8).fill("decline"), [2, 2, 2, 2]);
}

async function createLink(
  controller: WizardController,
  cause: string,
  effect: string,
) {
  const builder = controller.builder!;
  const old = controller.state.current.selected_nodes;
  const first = old.length === 0 || old.includes(cause) ? "cause" : "effect";
  const second = first === "cause" ? "effect" : "cause";
  builder.openDropdown(first);
  builder.choose(first, first === "cause" ? cause : effect);
  builder.openDropdown(second);
  builder.choose(second, second === "cause" ? cause : effect);
  await controller.confirmLink();
  expect(builder.clicks).toBeLessThanOrEqual(5);
}

describe("wizard protocol flow", () => {
  it("walks the whole protocol to a verification code", async () => {
    const { controller } = setup();
    await controller.start();
    expect(controller.state.current.stage).toBe("instructions");

    // a wrong gate answer loops, a right one advances
    expect(await controller.answerGate("more B", "more A")).toBe(false);
    expect(controller.state.current.stage).toBe("test");
    expect(await controller.answerGate("more A", "more B")).toBe(true);
    expect(controller.state.current.stage).toBe("demographics");

    await controller.sendDemographics(Array(8).fill("decline"), [3, 3, 3, 3]);
    expect(controller.state.current.stage).toBe("creation");

    const links: [string, string][] = [
      ["more A", "more B"],
      ["more B", "more C"],
      ["more C", "less D"],
      ["less D", "less B"],
      ["less C", "less D"],
    ];
    for (const [cause, effect] of links) {
      await createLink(controller, cause, effect);
    }
    expect(controller.state.current.stage).toBe("alteration");
    expect(controller.state.current.links.length).toBe(5);

    await controller.keepNetwork();
    expect(controller.state.current.stage).toBe("evaluation");

    await controller.sendConfidence(4);
    expect(controller.state.current.stage).toBe("usability");

    const code = await controller.sendUsability([4, 2, 5, 1, 4, 3, 3]);
    expect(code).toHaveLength(12);
    expect(controller.state.current.stage).toBe("complete");
    expect(controller.render()).toContain(code!);
  });

  it("surfaces a round-rule violation inline and restarts the round", async () => {
    const { controller } = setup();
    await reachCreation(controller);
    await createLink(controller, "more A", "more B");

    // bypass the narrowed drop-downs to force a server-side rejection
    const builder = controller.builder!;
    builder.selection = { cause: "more C", effect: "less C", firstSide: "cause" };
    builder.clicks = 4;
    const result = await controller.confirmLink();
    expect(result).toBeNull();
    expect(controller.lastError).toContain("SelfBase");
    expect(builder.selection.cause).toBeNull(); // round restarted
    expect(controller.state.current.links.length).toBe(1); // no state change
    expect(controller.render()).toContain("SelfBase");
  });

  it("round-two drop-downs enforce the old-node/new-node rule", async () => {
    const { controller } = setup();
    await reachCreation(controller);
    await createLink(controller, "more A", "more B");

    const builder = new LinkBuilder(controller.state.current);
    const causeOptions = builder.openDropdown("cause");
    expect(causeOptions).toEqual(["more A", "more B"]); // old nodes only
    builder.choose("cause", "more B");
    const effectOptions = builder.openDropdown("effect");
    for (const option of effectOptions) {
      expect(["more A", "more B"]).not.toContain(option); // new nodes only
    }
  });

  it("applies a change-direction alteration through the server", async () => {
    const { controller } = setup();
    await reachCreation(controller);
    const links: [string, string][] = [
      ["more A", "more B"],
      ["more B", "more C"],
      ["more C", "less D"],
      ["less D", "less B"],
      ["less C", "less D"],
    ];
    for (const [cause, effect] of links) {
      await createLink(controller, cause, effect);
    }
    controller.selectedEdge = 0;
    await controller.alter(0, "change_direction");
    expect(controller.state.current.stage).toBe("evaluation");
    expect(controller.state.current.links[0]).toEqual({
      cause: "more B",
      effect: "more A",
    });
  });

  it("shows the server narrative byte-for-byte at evaluation", async () => {
    const { controller, server } = setup();
    await reachCreation(controller);
    const links: [string, string][] = [
      ["more A", "more B"],
      ["more B", "more C"],
      ["more C", "less D"],
      ["less D", "less B"],
      ["less C", "less D"],
    ];
    for (const [cause, effect] of links) {
      await createLink(controller, cause, effect);
    }
    await controller.keepNetwork();
    const serverNarrative = controller.state.current.narrative!;
    expect(serverNarrative.length).toBeGreaterThan(0);
    expect(controller.render()).toContain(serverNarrative);
    // and the view's links always mirror the server's, count and direction
    const held = server.sessions.get(controller.state.current.id)!;
    expect(controller.state.current.links).toEqual(held.links);
  });

  it("restores a mid-session state after a reload", async () => {
    const { controller, storage, api } = setup();
    await reachCreation(controller);
    await createLink(controller, "more A", "more B");
    await createLink(controller, "more B", "more C");
    const before = controller.state.current;

    // a "reload": a new controller over the same storage and server
    const revived = new WizardController(api, storage);
    await revived.start();
    expect(revived.state.current.id).toBe(before.id);
    expect(revived.state.current.stage).toBe("creation");
    expect(revived.state.current.links).toEqual(before.links);
    expect(revived.state.current.remaining_rounds).toBe(3);
    // and it remains usable
    await createLink(revived, "more C", "less D");
    expect(revived.state.current.links.length).toBe(3);
  });

  it("renders a graph that matches the server's DOT", async () => {
    const { controller } = setup();
    await reachCreation(controller);
    await createLink(controller, "more A", "more B");
    await createLink(controller, "more B", "more C");
    const svg = controller.graphSvg()!;
    expect(svg.match(/<line /g)!.length).toBe(2);
    expect(svg).toContain("more A");
    expect(svg).toContain("more C");
  });
});
