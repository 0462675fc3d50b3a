// Voter application state machine: the linear screen workflow (login,
// instructions, candidate selection, confirmation, cast, done), the
// verification path behind mandatory Q&A screens, board rendering with the
// voter's row highlighted, and the coercion fake-tracker dialog. Display
// modes only add informational panels; they never change what goes over
// the wire.

import {
  assembleAlpha,
  ballotMessage,
  bigToHex,
  candidateEncoding,
  encrypt,
  fakeAlpha,
  hexToBig,
  openCommitment,
  sign,
  groupProfile,
  trackerDisplay,
  trackerParse,
  verifyChain,
  TEST,
  type BoardEntry,
  type Group,
} from "./crypto.js";
import { ApiClient, type StatusResponse } from "./api.js";

export type DisplayMode = "baseline" | "extended";

export interface AppConfig {
  serverUrl: string;
  displayMode: DisplayMode;
}

// One-to-one with the linear workflow; back-steps move a single position.
export const SCREENS = [
  "login",
  "instructions",
  "select",
  "confirm",
  "cast",
  "done",
  "qna",
  "verified",
] as const;

export type ScreenId =
  | (typeof SCREENS)[number]
  | "waiting"
  | "board"
  | "closed"
  | "chain-broken"
  | "tracker-missing"
  | "no-candidate-rows"
  | "error";

export interface BoardRow {
  index: number;
  tracker: string;
  candidate: string;
  highlighted: boolean;
}

export interface ScreenModel {
  screen: ScreenId;
  canBack: boolean;
  hasBallotControls: boolean;
  candidates?: [string, string][];
  qnaText?: string[];
  boardRows?: BoardRow[];
  highlightIndex?: number | null;
  trackerDisplay?: string;
  match?: boolean | null;
  // Informational panels shown during waits in extended mode; rendered
  // above progress indicators so a progress bar never hides them.
  securityPanels: { placement: "above-progress"; text: string }[];
  evidenceDownload?: string;
  errorCode?: string;
}

// Paraphrased briefing text; the mandatory Q&A explains what the tracking
// number is for before the voter may verify.
export const QNA_TEXT = [
  "Q: What is my tracking number? A: A private number assigned to your " +
    "ballot. After results are published it appears on the public board " +
    "next to the vote that was counted for you.",
  "Q: Why check it? A: Finding your tracking number next to your choice " +
    "confirms your vote was counted in the final tally. Nobody else can " +
    "tell which number is yours.",
];

const SECURITY_PANEL_TEXT = [
  "Your ballot is encrypted in your browser before it is sent.",
  "Several independent tellers shuffle and jointly decrypt the ballots; " +
    "no single party can link your tracking number to you.",
  "The public board is an append-only hash chain; any alteration is " +
    "detectable by anyone.",
];

export function securityPanels(mode: DisplayMode): ScreenModel["securityPanels"] {
  if (mode === "baseline") return [];
  return SECURITY_PANEL_TEXT.map((text) => ({ placement: "above-progress", text }));
}

// Entry screen from the server flags, as the workflow figure prescribes.
export function renderWorkflow(status: StatusResponse, mode: DisplayMode): ScreenModel {
  const panels = securityPanels(mode);
  if (status.phase === "Vote" && !status.has_voted) {
    return {
      screen: "instructions",
      canBack: true,
      hasBallotControls: true,
      candidates: status.candidates,
      securityPanels: panels,
    };
  }
  if (status.phase === "Vote" && status.has_voted) {
    return { screen: "done", canBack: false, hasBallotControls: false, securityPanels: panels };
  }
  if (status.phase === "Verify") {
    return {
      screen: "qna",
      canBack: false,
      hasBallotControls: false,
      qnaText: QNA_TEXT,
      securityPanels: panels,
    };
  }
  if (status.phase === "Published") {
    return { screen: "board", canBack: false, hasBallotControls: false, securityPanels: panels };
  }
  if (status.phase === "Closed") {
    return { screen: "closed", canBack: false, hasBallotControls: false, securityPanels: panels };
  }
  return { screen: "waiting", canBack: false, hasBallotControls: false, securityPanels: panels };
}

export class WorkflowError extends Error {}

interface ResultRowParsed {
  index: number;
  tracker: string;
  candidate: string;
}

function parseResultRows(entries: BoardEntry[]): ResultRowParsed[] {
  const rows: ResultRowParsed[] = [];
  const decoder = new TextDecoder();
  for (const e of entries) {
    if (e.kind !== "Result") continue;
    const text = decoder.decode(
      Uint8Array.from(e.payload.match(/../g)!.map((h) => parseInt(h, 16))),
    );
    const sep = text.indexOf(":");
    rows.push({ index: e.index, tracker: text.slice(0, sep), candidate: text.slice(sep + 1) });
  }
  return rows;
}

function poolFromEntries(entries: BoardEntry[]): bigint[] {
  const decoder = new TextDecoder();
  for (const e of entries) {
    if (e.kind !== "Setup") continue;
    const row = JSON.parse(
      decoder.decode(Uint8Array.from(e.payload.match(/../g)!.map((h) => parseInt(h, 16)))),
    );
    if (row.row === "election") return (row.pool as number[]).map(BigInt);
  }
  throw new WorkflowError("board carries no election setup row");
}

function voterBeta(entries: BoardEntry[], voterId: string): bigint {
  const decoder = new TextDecoder();
  for (const e of entries) {
    if (e.kind !== "Setup") continue;
    const row = JSON.parse(
      decoder.decode(Uint8Array.from(e.payload.match(/../g)!.map((h) => parseInt(h, 16)))),
    );
    if (row.row === "voter" && row.voter_id === voterId) return hexToBig(row.beta);
  }
  throw new WorkflowError(`no setup row for voter ${voterId}`);
}

function defaultRand32(): number {
  const buf = new Uint32Array(1);
  crypto.getRandomValues(buf);
  return buf[0]!;
}

export function randScalar(group: Group, rand32: () => number): bigint {
  let n = 0n;
  for (let i = 0; i < 8; i++) n = (n << 32n) | BigInt(rand32() >>> 0);
  return (n % (group.q - 1n)) + 1n;
}

export interface VoterKeys {
  trapdoorSk?: bigint;
  signingSk?: bigint;
}

export class VoterApp {
  position: ScreenId = "login";
  status: StatusResponse | null = null;
  selectedCandidate: string | null = null;
  castChoice: string | null = null;
  private group: Group = TEST;
  private rand32: () => number;

  constructor(
    public api: ApiClient,
    private voterId: string,
    private keys: VoterKeys = {},
    public displayMode: DisplayMode = "baseline",
    rand32?: () => number,
  ) {
    this.rand32 = rand32 ?? defaultRand32;
  }

  screen(): ScreenModel {
    if (this.status === null) {
      return {
        screen: "login",
        canBack: false,
        hasBallotControls: false,
        securityPanels: securityPanels(this.displayMode),
      };
    }
    if (this.position === "qna") {
      return {
        screen: "qna",
        canBack: false,
        hasBallotControls: false,
        qnaText: QNA_TEXT,
        securityPanels: securityPanels(this.displayMode),
      };
    }
    const entry = renderWorkflow(this.status, this.displayMode);
    if (["instructions", "select", "confirm", "cast", "done"].includes(this.position)) {
      return { ...entry, screen: this.position };
    }
    return entry;
  }

  async login(credential: string): Promise<ScreenModel> {
    await this.api.auth(this.voterId, credential);
    this.status = await this.api.status();
    this.group = groupProfile(this.status.group_profile);
    this.position = "instructions";
    return renderWorkflow(this.status, this.displayMode);
  }

  back(): void {
    const i = SCREENS.indexOf(this.position as (typeof SCREENS)[number]);
    if (i <= 0) throw new WorkflowError("already at the first screen");
    this.position = SCREENS[i - 1]!;
  }

  selectCandidate(candidateId: string): void {
    if (this.position !== "instructions") {
      throw new WorkflowError(`cannot select a candidate from ${this.position}`);
    }
    if (!this.status!.candidates.some(([cid]) => cid === candidateId)) {
      throw new WorkflowError(`unknown candidate ${candidateId}`);
    }
    this.selectedCandidate = candidateId;
    this.position = "select";
  }

  confirm(): void {
    if (this.position !== "select") {
      throw new WorkflowError(`cannot confirm from ${this.position}`);
    }
    this.position = "confirm";
  }

  async castVote(): Promise<number> {
    if (this.position !== "confirm") {
      throw new WorkflowError("casting requires passing Select and Confirm first");
    }
    if (this.keys.signingSk === undefined) {
      throw new WorkflowError("voting requires the signing key");
    }
    this.status = await this.api.status();
    if (this.status.phase !== "Vote") {
      throw new WorkflowError(`cannot cast in phase ${this.status.phase}`);
    }
    const candIds = this.status.candidates.map(([cid]) => cid);
    const m = candidateEncoding(this.group, candIds).get(this.selectedCandidate!)!;
    const r = randScalar(this.group, this.rand32);
    const encVote = encrypt(this.group, hexToBig(this.status.election_pk), m, r);
    const msg = ballotMessage(this.status.election_id, this.voterId, encVote);
    const nonce = randScalar(this.group, this.rand32);
    const sig = await sign(this.group, this.keys.signingSk, msg, nonce);
    const index = await this.api.ballot(
      { alpha: bigToHex(encVote.alpha), beta: bigToHex(encVote.beta) },
      { commit: bigToHex(sig.commit), response: bigToHex(sig.response) },
    );
    this.castChoice = this.selectedCandidate;
    this.position = "done";
    return index;
  }

  acknowledgeQna(): void {
    if (this.position !== "instructions" && this.position !== "done") {
      throw new WorkflowError(`cannot enter Q&A from ${this.position}`);
    }
    this.position = "qna";
  }

  // The one-button verification: fetch alpha shares and the board, open
  // the tracker commitment in-browser, and render the board with exactly
  // the voter's row highlighted.
  async verifyAndHighlight(): Promise<ScreenModel> {
    if (this.position !== "qna") {
      throw new WorkflowError("the Q&A screens are mandatory before verification");
    }
    if (this.keys.trapdoorSk === undefined) {
      throw new WorkflowError("verification requires the trapdoor key");
    }
    this.status = await this.api.status();
    if (this.status.phase !== "Verify") {
      throw new WorkflowError(`verification opens in the Verify phase, not ${this.status.phase}`);
    }
    const alphaResp = await this.api.alpha();
    const entries = await this.api.board();
    const panels = securityPanels(this.displayMode);

    const chain = await verifyChain(entries);
    const evidence = JSON.stringify({
      voter_id: this.voterId,
      beta: alphaResp.beta,
      alpha_shares: alphaResp.shares,
      board: entries,
    });
    if (!chain.ok) {
      return {
        screen: "chain-broken",
        canBack: false,
        hasBallotControls: false,
        securityPanels: panels,
        evidenceDownload: evidence,
        errorCode: `first bad entry ${chain.firstBad}`,
      };
    }
    const alpha = assembleAlpha(this.group, alphaResp.shares.map((s) => hexToBig(s.share)));
    const beta = hexToBig(alphaResp.beta);
    const pool = poolFromEntries(entries);
    const trackerValue = openCommitment(this.group, beta, alpha, this.keys.trapdoorSk, pool);
    if (trackerValue === null) {
      return {
        screen: "tracker-missing",
        canBack: false,
        hasBallotControls: false,
        securityPanels: panels,
        evidenceDownload: evidence,
      };
    }
    const display = trackerDisplay(trackerValue);
    const rows = parseResultRows(entries);
    const mine = rows.find((r) => r.tracker === display);
    if (!mine) {
      return {
        screen: "tracker-missing",
        canBack: false,
        hasBallotControls: false,
        securityPanels: panels,
        trackerDisplay: display,
        evidenceDownload: evidence,
      };
    }
    this.position = "verified";
    return {
      screen: "verified",
      canBack: true,
      hasBallotControls: false,
      boardRows: rows.map((r) => ({
        index: r.index,
        tracker: r.tracker,
        candidate: r.candidate,
        highlighted: r.index === mine.index,
      })),
      highlightIndex: mine.index,
      trackerDisplay: display,
      match: this.castChoice === null ? null : mine.candidate === this.castChoice,
      securityPanels: panels,
    };
  }

  async browseBoard(): Promise<ScreenModel> {
    this.status = await this.api.status();
    if (this.status.phase !== "Published" && this.status.phase !== "Verify") {
      throw new WorkflowError(`board browsing opens at publication, not ${this.status.phase}`);
    }
    const entries = await this.api.board();
    const chain = await verifyChain(entries);
    if (!chain.ok) {
      return {
        screen: "chain-broken",
        canBack: false,
        hasBallotControls: false,
        securityPanels: securityPanels(this.displayMode),
        errorCode: `first bad entry ${chain.firstBad}`,
      };
    }
    return {
      screen: "board",
      canBack: false,
      hasBallotControls: false,
      boardRows: parseResultRows(entries).map((r) => ({
        index: r.index,
        tracker: r.tracker,
        candidate: r.candidate,
        highlighted: false,
      })),
      highlightIndex: null,
      securityPanels: securityPanels(this.displayMode),
    };
  }

  // Coercion dialog: reachable only behind an unmarked gesture in the real
  // UI. Issues exactly the same requests as an honest board browse and
  // returns a screen with the same component structure as the genuine
  // verification screen.
  async coercionDialog(coercedCandidate: string): Promise<ScreenModel> {
    if (this.keys.trapdoorSk === undefined) {
      throw new WorkflowError("faking requires the trapdoor key");
    }
    this.status = await this.api.status();
    if (this.status.phase !== "Published" && this.status.phase !== "Verify") {
      throw new WorkflowError(`no published trackers in phase ${this.status.phase}`);
    }
    const entries = await this.api.board();
    const rows = parseResultRows(entries);
    const candidateRows = rows.filter((r) => r.candidate === coercedCandidate);
    if (candidateRows.length === 0) {
      return {
        screen: "no-candidate-rows",
        canBack: true,
        hasBallotControls: false,
        errorCode: `no published votes for ${coercedCandidate}`,
        securityPanels: securityPanels(this.displayMode),
      };
    }
    const beta = voterBeta(entries, this.voterId);
    const chosen = candidateRows[this.rand32() % candidateRows.length]!;
    const fakeN = trackerParse(chosen.tracker);
    // computed locally so it can be shown if the coercer demands an opening
    fakeAlpha(this.group, beta, fakeN, this.keys.trapdoorSk);
    return {
      screen: "verified",
      canBack: true,
      hasBallotControls: false,
      boardRows: rows.map((r) => ({
        index: r.index,
        tracker: r.tracker,
        candidate: r.candidate,
        highlighted: r.index === chosen.index,
      })),
      highlightIndex: chosen.index,
      trackerDisplay: chosen.tracker,
      match: null,
      securityPanels: securityPanels(this.displayMode),
    };
  }
}
