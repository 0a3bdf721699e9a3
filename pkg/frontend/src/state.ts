// Client-side session state and the drop-down logic for link creation.
//
// The server validates everything; this module only narrows what the
// drop-downs offer so a careful participant cannot even attempt a
// round-rule violation, and counts the clicks a link creation takes.

import type { SessionView } from "./api.js";

export type Side = "cause" | "effect";

/** Base attribute of a display such as "more trapped heat": everything
 * after the leading trend term. The server enforces the real rule; this is
 * only used to grey out the obviously invalid partner option. */
export function sameAttribute(a: string, b: string): boolean {
  const tail = (s: string) => s.split(" ").slice(1).join(" ");
  return tail(a) === tail(b) && tail(a) !== "";
}

export interface DropdownState {
  cause: string | null;
  effect: string | null;
  firstSide: Side | null;
}

export function emptySelection(): DropdownState {
  return { cause: null, effect: null, firstSide: null };
}

/**
 * Options for one drop-down under the round rule.
 *
 * Round 1: both sides offer the whole (session-shuffled) catalog. Later
 * rounds: the first side the participant opens offers only nodes already
 * in the network; the other side offers only new nodes. Either way the
 * partner's selection and its opposite-trend twin are excluded.
 */
export function optionsFor(
  view: SessionView,
  selection: DropdownState,
  side: Side,
): string[] {
  const old = new Set(view.selected_nodes);
  const firstRound = view.links.length === 0;
  let pool: string[];
  if (firstRound) {
    pool = view.attribute_order;
  } else if (selection.firstSide === null || selection.firstSide === side) {
    pool = view.attribute_order.filter((d) => old.has(d));
  } else {
    pool = view.attribute_order.filter((d) => !old.has(d));
  }
  const other = side === "cause" ? selection.effect : selection.cause;
  if (other !== null) {
    pool = pool.filter((d) => d !== other && !sameAttribute(d, other));
  }
  return pool;
}

export class LinkBuilder {
  /** Click ledger for the current link: dropdown opens, option picks, and
   * the confirm button. The whole flow must fit in five. */
  clicks = 0;
  selection: DropdownState = emptySelection();

  constructor(private readonly view: SessionView) {}

  openDropdown(side: Side): string[] {
    this.clicks += 1;
    if (this.selection.firstSide === null) {
      this.selection.firstSide = side;
    }
    return optionsFor(this.view, this.selection, side);
  }

  choose(side: Side, display: string): void {
    const allowed = optionsFor(this.view, this.selection, side);
    if (!allowed.includes(display)) {
      throw new Error(`${display} is not offered for the ${side} drop-down`);
    }
    this.clicks += 1;
    this.selection[side] = display;
  }

  /** The "restart their choices" affordance: clears both drop-downs. */
  restart(): void {
    this.selection = emptySelection();
  }

  confirm(): { cause: string; effect: string } {
    if (this.selection.cause === null || this.selection.effect === null) {
      throw new Error("both drop-downs must be chosen before confirming");
    }
    this.clicks += 1;
    return { cause: this.selection.cause, effect: this.selection.effect };
  }
}

const STAGE_RANK: Record<string, number> = {
  instructions: 0,
  test: 1,
  demographics: 2,
  creation: 3,
  alteration: 4,
  evaluation: 5,
  usability: 6,
  complete: 7,
};

/** Local cache of the last server response. The UI never advances past
 * what the server has acknowledged. */
export class UiSessionState {
  private view: SessionView | null = null;

  apply(view: SessionView): SessionView {
    if (this.view && STAGE_RANK[view.stage] < STAGE_RANK[this.view.stage]) {
      throw new Error(
        `server went backwards: ${this.view.stage} -> ${view.stage}`,
      );
    }
    this.view = view;
    return view;
  }

  get current(): SessionView {
    if (!this.view) {
      throw new Error("no session yet");
    }
    return this.view;
  }

  get started(): boolean {
    return this.view !== null;
  }

  /** Most recent link, echoed as text under the graph. */
  lastLinkText(): string | null {
    const links = this.current.links;
    if (links.length === 0) return null;
    const last = links[links.length - 1];
    return `${last.cause} leads to ${last.effect}`;
  }
}

const STORAGE_KEY = "causalcrowd.session";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export function rememberSession(storage: StorageLike, id: string): void {
  storage.setItem(STORAGE_KEY, id);
}

export function storedSession(storage: StorageLike): string | null {
  return storage.getItem(STORAGE_KEY);
}

export function forgetSession(storage: StorageLike): void {
  storage.removeItem(STORAGE_KEY);
}
