// Interchange schema, format_version 1. Produced by `traitproof check
// --format json`; consumed read-only by the viewer.

export type ResultKind = "yes" | "no" | "amb" | "ovf" | "cyc";

export interface Span {
  file: string;
  line_start: number;
  col_start: number;
  line_end: number;
  col_end: number;
}

export interface GoalNode {
  id: number;
  kind: "goal";
  display: string;
  result: ResultKind;
  depth: number;
  children: number[];
  span: Span;
  overlap?: boolean;
  collapsed?: number;
}

export interface CandidateNode {
  id: number;
  kind: "candidate";
  impl_id: number | null;
  result: ResultKind;
  unify: "ok" | "ctor_clash" | "arity_clash" | "occurs_check" | "skolem_clash";
  children: number[];
  span: Span;
  display: string;
  solution: { display: string } | null;
  hypothesis?: number;
  collapsed?: number;
}

export interface SummaryNode {
  id: number;
  kind: "summary";
  display: string;
  result: ResultKind;
  replaced: number;
  children: number[];
}

export type TreeNode = GoalNode | CandidateNode | SummaryNode;

export interface DiagnosisEntry {
  rank: number;
  node: number;
  rendered_bound: string;
  score: { depth: number; progress: string; source_order: number };
  path: number[];
  span: Span;
}

export interface TreeDocument {
  format_version: number;
  program_file: string;
  program_hash: string;
  query_index: number;
  config: { max_depth: number; max_nodes: number };
  prune_policy: string;
  query_span: Span;
  root: number;
  nodes: TreeNode[];
  diagnosis: DiagnosisEntry[];
}

export type FilterMode = "all" | "failed";

export type DiagnosisStep = "next" | "prev" | { jump: number };

export interface ViewState {
  doc: TreeDocument;
  /** node ids whose children are currently shown; the root is pinned in */
  expanded: ReadonlySet<number>;
  filter: FilterMode;
  selected: number | null;
  /** index into doc.diagnosis, -1 when it is empty */
  diagnosisCursor: number;
  /** parents whose hidden proven children were revealed while filtering */
  revealedChips: ReadonlySet<number>;
  notice: string;
  /** verified program text for source excerpts, when available */
  sourceText: string | null;
  // derived once at load
  byId: ReadonlyMap<number, TreeNode>;
  parentOf: ReadonlyMap<number, number>;
  /** ids whose subtree (self included) contains a non-proven result */
  nonProvenBearing: ReadonlySet<number>;
}
