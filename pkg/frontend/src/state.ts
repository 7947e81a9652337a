// Editor state and pure transition functions. Every server request is
// tagged with the revision current when it was fired; a response whose tag
// no longer matches is stale and must not be rendered.

import type { Suggestion } from "./api.js";

export const MAX_SUGGESTIONS = 5;

export type Connection = "idle" | "connecting" | "ready" | "error";

export interface EditorState {
  sessionId: string | null;
  systemId: string;
  difficult: string;
  typed: string[];
  pending: string; // partial word still in the input box
  suggestions: Suggestion[];
  winner: string | null;
  revision: number; // bumped on every change that invalidates suggestions
  inFlight: boolean;
  connection: Connection;
  lastError: string | null;
}

export function initialState(): EditorState {
  return {
    sessionId: null,
    systemId: "",
    difficult: "",
    typed: [],
    pending: "",
    suggestions: [],
    winner: null,
    revision: 0,
    inFlight: false,
    connection: "idle",
    lastError: null,
  };
}

// Mirrors the server tokenizer: lowercase, punctuation marks isolated.
const TOKEN_RE = /[.,;:!?()"']|[^\s.,;:!?()"']+/g;

export function tokenizeText(text: string): string[] {
  return text.toLowerCase().match(TOKEN_RE) ?? [];
}

const BOUNDARY_RE = /[\s.,;:!?()"']$/;

export interface BoundarySplit {
  commit: string[]; // completed tokens to send as type events
  pending: string; // raw tail still being typed
}

// Decide which tokens of the input box are complete. A trailing space or
// punctuation mark completes everything; otherwise the last chunk is still
// being typed and stays in the box.
export function splitAtBoundary(text: string): BoundarySplit {
  const tokens = tokenizeText(text);
  if (tokens.length === 0) return { commit: [], pending: text.trim() };
  if (BOUNDARY_RE.test(text)) return { commit: tokens, pending: "" };
  const last = tokens[tokens.length - 1] as string;
  return { commit: tokens.slice(0, -1), pending: last };
}

export function sessionStarted(
  state: EditorState,
  sessionId: string,
  difficult: string,
  systemId: string,
): EditorState {
  return {
    ...initialState(),
    sessionId,
    difficult,
    systemId,
    connection: "ready",
  };
}

export function commitTokens(state: EditorState, tokens: string[]): EditorState {
  if (tokens.length === 0) return state;
  return {
    ...state,
    typed: [...state.typed, ...tokens],
    suggestions: [],
    winner: null,
    revision: state.revision + 1,
  };
}

export function popToken(state: EditorState): EditorState {
  if (state.typed.length === 0) return state;
  return {
    ...state,
    typed: state.typed.slice(0, -1),
    suggestions: [],
    winner: null,
    revision: state.revision + 1,
  };
}

export function setPending(state: EditorState, pending: string): EditorState {
  return { ...state, pending };
}

// Suggestions are cleared while a request is in flight.
export function markRequestStarted(state: EditorState): EditorState {
  return { ...state, suggestions: [], winner: null, inFlight: true };
}

export function applySuggestions(
  state: EditorState,
  requestRevision: number,
  suggestions: Suggestion[],
  winner: string | null,
): EditorState {
  if (requestRevision !== state.revision) {
    return state; // stale response: discard, keep whatever is current
  }
  return {
    ...state,
    suggestions: suggestions.slice(0, MAX_SUGGESTIONS),
    winner,
    inFlight: false,
    connection: "ready",
    lastError: null,
  };
}

export function requestSettled(state: EditorState): EditorState {
  return state.inFlight ? { ...state, inFlight: false } : state;
}

export function requestFailed(state: EditorState, message: string): EditorState {
  return {
    ...state,
    suggestions: [],
    winner: null,
    inFlight: false,
    connection: "error",
    lastError: message,
  };
}

// One completed simplification as a corpus TSV line (id, title, difficult,
// simple), ready to feed back into the extraction pipeline.
export function exportTsvLine(
  state: EditorState,
  pairId: string,
  title: string,
): string {
  const clean = (s: string) => s.replace(/[\t\n]/g, " ").trim();
  return [
    clean(pairId),
    clean(title),
    clean(state.difficult),
    state.typed.join(" "),
  ].join("\t");
}
