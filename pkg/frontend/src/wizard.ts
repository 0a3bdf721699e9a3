// Linear wizard over the session stages. Rendering returns HTML strings
// (kept DOM-free so the flow is testable); main.ts wires them into the
// page and routes events back into the controller.

import { ApiClient, ApiError, SessionView, AlterationChoice } from "./api.js";
import { parseDot, renderSvg } from "./dot.js";
import {
  LinkBuilder,
  UiSessionState,
  StorageLike,
  rememberSession,
  storedSession,
} from "./state.js";

const SASSY_ITEMS = 4;
const DEMOGRAPHIC_ITEMS = 8;
const USABILITY_ITEMS = 7;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function options(values: string[]): string {
  return values
    .map((v) => `<option value="${escapeHtml(v)}">${escapeHtml(v)}</option>`)
    .join("");
}

function likert(name: string, points = 5): string {
  const buttons = Array.from(
    { length: points },
    (_, i) =>
      `<label><input type="radio" name="${name}" value="${i + 1}">${i + 1}</label>`,
  );
  return `<span class="likert">${buttons.join("")}</span>`;
}

export class WizardController {
  readonly state = new UiSessionState();
  lastError: string | null = null;
  builder: LinkBuilder | null = null;
  selectedEdge: number | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly storage: StorageLike,
  ) {}

  /** Resume the stored session if one exists, else start fresh. */
  async start(): Promise<SessionView> {
    const stored = storedSession(this.storage);
    if (stored) {
      try {
        return this.apply(await this.api.getSession(stored));
      } catch {
        // stale id; fall through to a new session
      }
    }
    const view = await this.api.createSession();
    rememberSession(this.storage, view.id);
    return this.apply(view);
  }

  private apply(view: SessionView): SessionView {
    this.lastError = null;
    const applied = this.state.apply(view);
    if (applied.stage === "creation") {
      this.builder = new LinkBuilder(applied);
    } else {
      this.builder = null;
    }
    return applied;
  }

  private async guarded<T>(call: () => Promise<T>): Promise<T | null> {
    try {
      const result = await call();
      this.lastError = null;
      return result;
    } catch (error) {
      if (error instanceof ApiError) {
        this.lastError = `${error.code}: ${error.message}`;
        return null;
      }
      throw error;
    }
  }

  async answerGate(cause: string, effect: string): Promise<boolean> {
    const result = await this.api.submitTest(this.state.current.id, cause, effect);
    this.apply(await this.api.getSession(this.state.current.id));
    return result.passed;
  }

  async sendDemographics(demographics: string[], sassy: number[]): Promise<void> {
    await this.guarded(() =>
      this.api.submitDemographics(this.state.current.id, demographics, sassy),
    );
    this.apply(await this.api.getSession(this.state.current.id));
  }

  /** Confirm the current drop-down pair. On a server violation the round
   * restarts locally and the message is surfaced inline. */
  async confirmLink(): Promise<SessionView | null> {
    if (!this.builder) throw new Error("not in the creation stage");
    const { cause, effect } = this.builder.confirm();
    const view = await this.guarded(() =>
      this.api.submitLink(this.state.current.id, cause, effect),
    );
    if (view === null) {
      this.builder.restart();
      return null;
    }
    return this.apply(view);
  }

  async alter(linkIndex: number, action: AlterationChoice): Promise<void> {
    const view = await this.guarded(() =>
      this.api.submitAlterations(this.state.current.id, [
        { link_index: linkIndex, action },
      ]),
    );
    if (view !== null) {
      this.selectedEdge = null;
      this.apply(view);
    }
  }

  async keepNetwork(): Promise<void> {
    const view = await this.guarded(() =>
      this.api.submitAlterations(this.state.current.id, []),
    );
    if (view !== null) this.apply(view);
  }

  async sendConfidence(confidence: number): Promise<void> {
    await this.guarded(() =>
      this.api.submitConfidence(this.state.current.id, confidence),
    );
    this.apply(await this.api.getSession(this.state.current.id));
  }

  async sendUsability(ratings: number[]): Promise<string | null> {
    const result = await this.guarded(() =>
      this.api.submitUsability(this.state.current.id, ratings),
    );
    this.apply(await this.api.getSession(this.state.current.id));
    return result ? result.verification_code : null;
  }

  graphSvg(): string | null {
    const dot = this.state.current.dot;
    if (!dot) return null;
    return renderSvg(parseDot(dot), {
      selectedEdge: this.selectedEdge ?? undefined,
    });
  }

  render(): string {
    const view = this.state.current;
    const error = this.lastError
      ? `<p class="error" role="alert">${escapeHtml(this.lastError)}</p>`
      : "";
    switch (view.stage) {
      case "instructions":
      case "test":
        return this.renderGate(view, error);
      case "demographics":
        return this.renderDemographics(error);
      case "creation":
        return this.renderCreation(view, error);
      case "alteration":
        return this.renderAlteration(view, error);
      case "evaluation":
        return this.renderEvaluation(view, error);
      case "usability":
        return this.renderUsability(error);
      case "complete":
        return this.renderComplete(view);
    }
  }

  private renderGate(view: SessionView, error: string): string {
    const retry =
      view.stage === "test"
        ? `<p class="error">That was not the example link; please try again.</p>`
        : "";
    return `<section id="stage-gate">
      <h2>Instructions</h2>
      <p>You will build a small causal network about climate, one link at a
      time: pick a cause, pick an effect, confirm. As a quick check, recreate
      the example link from the instructions.</p>
      ${retry}${error}
      <select id="gate-cause">${options(view.attribute_order)}</select>
      <span class="arrow">&#8594;</span>
      <select id="gate-effect">${options(view.attribute_order)}</select>
      <button id="gate-submit">Check</button>
    </section>`;
  }

  private renderDemographics(error: string): string {
    const demographics = Array.from(
      { length: DEMOGRAPHIC_ITEMS },
      (_, i) =>
        `<label>Question ${i + 1} <input name="demo-${i}" value="decline"></label>`,
    ).join("");
    const sassy = Array.from(
      { length: SASSY_ITEMS },
      (_, i) => `<div>Attitude item ${i + 1} ${likert(`sassy-${i}`, 4)}</div>`,
    ).join("");
    return `<section id="stage-demographics">
      <h2>About you</h2>${error}
      <form id="demographics-form">${demographics}${sassy}
      <button id="demographics-submit">Continue</button></form>
    </section>`;
  }

  private renderCreation(view: SessionView, error: string): string {
    const svg = this.graphSvg() ?? "<p>No links yet.</p>";
    const last = this.state.lastLinkText();
    const echo = last ? `<p class="last-link">${escapeHtml(last)}</p>` : "";
    const narrative = view.narrative
      ? `<p class="narrative">${escapeHtml(view.narrative)}</p>`
      : "";
    return `<section id="stage-creation">
      <h2>Create a link (${view.remaining_rounds} to go)</h2>${error}
      <select id="link-cause"></select>
      <span class="arrow">&#8594;</span>
      <select id="link-effect"></select>
      <button id="link-confirm">Confirm</button>
      <button id="link-restart">Restart choices</button>
      <div class="graph">${svg}</div>${echo}${narrative}
    </section>`;
  }

  private renderAlteration(view: SessionView, error: string): string {
    const deleteOption = view.allow_delete
      ? `<button data-action="delete">Delete</button>`
      : "";
    const optionBox =
      this.selectedEdge === null
        ? "<p>Click a link to alter it, or keep the network as it is.</p>"
        : `<div class="option-box">
            <button data-action="change_direction">Change direction</button>
            <button data-action="noop">Do not modify</button>
            ${deleteOption}
          </div>`;
    return `<section id="stage-alteration">
      <h2>Review your network</h2>${error}
      <div class="graph">${this.graphSvg() ?? ""}</div>
      ${optionBox}
      <button id="alteration-done">Keep network</button>
    </section>`;
  }

  private renderEvaluation(view: SessionView, error: string): string {
    return `<section id="stage-evaluation">
      <h2>Your finished network</h2>${error}
      <div class="graph">${this.graphSvg() ?? ""}</div>
      <p class="narrative">${escapeHtml(view.narrative ?? "")}</p>
      <p>How confident are you in this network?</p>
      ${likert("confidence")}
      <button id="confidence-submit">Submit</button>
    </section>`;
  }

  private renderUsability(error: string): string {
    const items = Array.from(
      { length: USABILITY_ITEMS },
      (_, i) => `<div>Statement ${i + 1} ${likert(`usability-${i}`)}</div>`,
    ).join("");
    return `<section id="stage-usability">
      <h2>Almost done</h2>${error}${items}
      <button id="usability-submit">Finish</button>
    </section>`;
  }

  private renderComplete(view: SessionView): string {
    return `<section id="stage-complete">
      <h2>Thank you!</h2>
      <p>Your verification code:</p>
      <p class="code">${escapeHtml(view.verification_code ?? "")}</p>
    </section>`;
  }
}
