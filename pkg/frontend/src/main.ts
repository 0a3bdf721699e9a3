// Page glue: wires the wizard controller's HTML into #app and routes DOM
// events back into it.

import { ApiClient } from "./api.js";
import { WizardController } from "./wizard.js";
import { optionsFor } from "./state.js";

const BASE_URL =
  (window as unknown as { CAUSALCROWD_API?: string }).CAUSALCROWD_API ??
  "http://127.0.0.1:8000";

const api = new ApiClient(BASE_URL);
const controller = new WizardController(api, window.localStorage);
const root = document.getElementById("app")!;

function readLikert(name: string): number | null {
  const checked = root.querySelector<HTMLInputElement>(
    `input[name="${name}"]:checked`,
  );
  return checked ? Number(checked.value) : null;
}

function paint(): void {
  root.innerHTML = controller.render();
  wire();
}

function wire(): void {
  const view = controller.state.current;

  root.querySelector("#gate-submit")?.addEventListener("click", async () => {
    const cause = root.querySelector<HTMLSelectElement>("#gate-cause")!.value;
    const effect = root.querySelector<HTMLSelectElement>("#gate-effect")!.value;
    await controller.answerGate(cause, effect);
    paint();
  });

  root
    .querySelector("#demographics-submit")
    ?.addEventListener("click", async (event) => {
      event.preventDefault();
      const demographics = Array.from(
        root.querySelectorAll<HTMLInputElement>("input[name^='demo-']"),
      ).map((input) => input.value || "decline");
      const sassy: number[] = [];
      for (let i = 0; i < 4; i++) {
        const value = readLikert(`sassy-${i}`);
        if (value === null) return; // incomplete; stay on the form
        sassy.push(value);
      }
      await controller.sendDemographics(demographics, sassy);
      paint();
    });

  const causeSelect = root.querySelector<HTMLSelectElement>("#link-cause");
  const effectSelect = root.querySelector<HTMLSelectElement>("#link-effect");
  if (causeSelect && effectSelect && controller.builder) {
    const builder = controller.builder;
    const fill = (select: HTMLSelectElement, values: string[]) => {
      select.innerHTML =
        `<option value="">choose...</option>` +
        values.map((v) => `<option>${v}</option>`).join("");
    };
    fill(causeSelect, optionsFor(view, builder.selection, "cause"));
    fill(effectSelect, optionsFor(view, builder.selection, "effect"));
    const onPick = (side: "cause" | "effect", select: HTMLSelectElement) => {
      select.addEventListener("mousedown", () => builder.openDropdown(side));
      select.addEventListener("change", () => {
        if (select.value) {
          builder.choose(side, select.value);
          const otherSide = side === "cause" ? "effect" : "cause";
          const other = side === "cause" ? effectSelect : causeSelect;
          fill(other, optionsFor(view, builder.selection, otherSide));
        }
      });
    };
    onPick("cause", causeSelect);
    onPick("effect", effectSelect);
    root.querySelector("#link-confirm")?.addEventListener("click", async () => {
      await controller.confirmLink();
      paint();
    });
    root.querySelector("#link-restart")?.addEventListener("click", () => {
      builder.restart();
      paint();
    });
  }

  root.querySelectorAll<SVGLineElement>("line[data-edge]").forEach((line) => {
    line.addEventListener("click", () => {
      controller.selectedEdge = Number(line.dataset.edge);
      paint();
    });
  });
  root.querySelectorAll<HTMLButtonElement>("[data-action]").forEach((button) => {
    button.addEventListener("click", async () => {
      if (controller.selectedEdge !== null) {
        await controller.alter(
          controller.selectedEdge,
          button.dataset.action as "noop" | "change_direction" | "delete",
        );
        paint();
      }
    });
  });
  root.querySelector("#alteration-done")?.addEventListener("click", async () => {
    await controller.keepNetwork();
    paint();
  });

  root.querySelector("#confidence-submit")?.addEventListener("click", async () => {
    const value = readLikert("confidence");
    if (value === null) return;
    await controller.sendConfidence(value);
    paint();
  });

  root.querySelector("#usability-submit")?.addEventListener("click", async () => {
    const ratings: number[] = [];
    for (let i = 0; i < 7; i++) {
      const value = readLikert(`usability-${i}`);
      if (value === null) return;
      ratings.push(value);
    }
    await controller.sendUsability(ratings);
    paint();
  });
}

controller.start().then(paint);
