// Editor controller: binds the API client to the pure state machine.
// Framework-free; the DOM layer just subscribes and re-renders.

import { type SessionState, type SuggestApi } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import {
  applySuggestions,
  commitTokens,
  initialState,
  markRequestStarted,
  popToken,
  requestFailed,
  requestSettled,
  sessionStarted,
  setPending,
  splitAtBoundary,
  type EditorState,
} from "./state.js";

export interface EditorOptions {
  debounceMs?: number;
  k?: number;
}

type Listener = (state: EditorState) => void;

export class EditorController {
  state: EditorState = initialState();

  private readonly listeners = new Set<Listener>();
  private readonly k: number;
  private readonly scheduleRequest: Debounced<[]>;
  private queued = false;

  constructor(
    private readonly api: SuggestApi,
    options: EditorOptions = {},
  ) {
    this.k = options.k ?? 5;
    this.scheduleRequest = debounce(() => {
      void this.fireRequest();
    }, options.debounceMs ?? 150);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private setState(next: EditorState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  /** Create a session for a pasted difficult sentence and fetch the first
   * suggestions (empty prefix). */
  async start(difficult: string, systemId: string): Promise<void> {
    this.scheduleRequest.cancel();
    this.setState({ ...initialState(), connection: "connecting" });
    try {
      const sessionId = await this.api.createSession(difficult, systemId);
      this.setState(sessionStarted(this.state, sessionId, difficult, systemId));
      this.scheduleRequest();
    } catch (err) {
      this.setState(requestFailed(this.state, String(err)));
      throw err;
    }
  }

  /** Handle the full content of the typing box after a keystroke. Word
   * boundaries commit type events and schedule fresh suggestions. */
  onInput(text: string): void {
    const { commit, pending } = splitAtBoundary(text);
    this.setState(setPending(this.state, pending));
    if (commit.length > 0) {
      void this.commitAndRefresh(commit);
    }
  }

  /** Digits 1..5 accept the suggestion at that rank. Returns true when the
   * key was consumed. */
  onDigitKey(key: string): boolean {
    if (!/^[1-5]$/.test(key)) return false;
    void this.accept(Number(key));
    return true;
  }

  /** Accept the rank-th (1-based) suggestion; no-op when the suggestion
   * list is shorter than the rank. */
  async accept(rank: number): Promise<void> {
    const entry = this.state.suggestions[rank - 1];
    if (!entry || this.state.sessionId === null) return;
    const word = entry.word;
    this.setState(commitTokens(this.state, [word]));
    try {
      const session = await this.api.sendEvent(this.state.sessionId, "accept", word);
      this.syncFromServer(session);
    } catch (err) {
      this.setState(requestFailed(this.state, String(err)));
      return;
    }
    this.scheduleRequest();
  }

  async backspace(): Promise<void> {
    if (this.state.sessionId === null || this.state.typed.length === 0) return;
    this.setState(popToken(this.state));
    try {
      const session = await this.api.sendEvent(this.state.sessionId, "backspace");
      this.syncFromServer(session);
    } catch (err) {
      this.setState(requestFailed(this.state, String(err)));
      return;
    }
    this.scheduleRequest();
  }

  /** Adopt the server's typed sequence if the optimistic local copy ever
   * drifts (the bump invalidates any in-flight suggestions). */
  private syncFromServer(session: SessionState): void {
    const local = this.state.typed;
    const remote = session.typed;
    const equal =
      local.length === remote.length && local.every((t, i) => t === remote[i]);
    if (!equal) {
      this.setState({
        ...this.state,
        typed: [...remote],
        suggestions: [],
        winner: null,
        revision: this.state.revision + 1,
      });
    }
  }

  /** Force the debounced request out immediately (used by tests). */
  flushPendingRequest(): void {
    this.scheduleRequest.flush();
  }

  private async commitAndRefresh(tokens: string[]): Promise<void> {
    if (this.state.sessionId === null) return;
    this.setState(commitTokens(this.state, tokens));
    try {
      let session: SessionState | null = null;
      for (const token of tokens) {
        session = await this.api.sendEvent(this.state.sessionId, "type", token);
      }
      if (session) this.syncFromServer(session);
    } catch (err) {
      this.setState(requestFailed(this.state, String(err)));
      return;
    }
    this.scheduleRequest();
  }

  private async fireRequest(): Promise<void> {
    if (this.state.sessionId === null) return;
    if (this.state.inFlight) {
      this.queued = true; // at most one request in flight
      return;
    }
    const revision = this.state.revision;
    this.setState(markRequestStarted(this.state));
    try {
      const resp = await this.api.suggest(this.state.sessionId, this.k);
      this.setState(
        applySuggestions(
          this.state,
          revision,
          resp.suggestions,
          resp.winner ?? null,
        ),
      );
    } catch (err) {
      this.setState(requestFailed(this.state, String(err)));
      return;
    } finally {
      this.setState(requestSettled(this.state));
      if (this.queued) {
        this.queued = false;
        void this.fireRequest();
      }
    }
  }
}
