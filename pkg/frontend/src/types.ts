// Document shapes served by the workbench API (see docs/schemas.md).

export interface SessionSummary {
  id: string;
  function: string;
  project: string;
  iterations: number;
  verdict: string;
  version: number;
}

export interface SessionsDoc {
  schema: number;
  sessions: SessionSummary[];
}

export interface Completeness {
  graceful_termination: boolean;
  full_coverage: boolean;
  violations_resolved: boolean;
  verdict: string;
  unmet: string[];
}

export interface SourceLocation {
  file: string;
  line: number;
  function: string;
}

export interface PropertyResult {
  id: string;
  class: string;
  status: string;
  location: SourceLocation;
  description: string;
  raw_class: string;
}

export interface TraceStep {
  index: number;
  location: SourceLocation;
  lhs: string;
  value: string;
  call: string;
}

export interface ReportDoc {
  schema?: number;
  run_status: { kind: string; message: string; elapsed_seconds: number };
  properties: PropertyResult[];
  coverage: CoverageLine[];
  traces: Record<string, { steps: TraceStep[] }>;
  solver_stats: { variable_count: number; clause_count: number; solve_seconds: number };
  wall_seconds: number;
  diagnostics: string[];
}

export interface Intervention {
  kind: string;
  rationale: string;
  confidence: string;
  model: { kind: string; subject: string } | null;
  stub: { target: string; kind: string } | null;
  loop_bound: { loop: string; bound: number; rationale: string } | null;
  path: string;
  define: string;
  value: string;
  string_max: number;
  property_id: string;
  note: string;
  location: SourceLocation | null;
}

export interface Diagnosis {
  finding: { kind: string; cause: string; subject: string; cycle: string[] };
  evidence: {
    locations: SourceLocation[];
    trace_steps: number[];
    property_id: string;
    notes: string;
  };
  suggestions: Intervention[];
}

export interface DiagnosesDoc {
  schema: number;
  revision: number;
  diagnoses: Diagnosis[];
}

export interface CoverageLine {
  file: string;
  line: number;
  function: string;
  status: string;
}

export interface CoverageDoc {
  schema: number;
  revision: number;
  coverage_percent: number;
  lines: CoverageLine[];
}

export interface ReviewItem {
  model: { kind: string; subject: string };
  status: string;
  origin_property: string;
  suggestion: Intervention | null;
}

export interface ReviewDoc {
  schema: number;
  items: ReviewItem[];
}

export interface HarnessDoc {
  schema: number;
  revision: number;
  pending: number;
  harness_source: string;
  makefile: string;
  diff: string;
}

export interface SessionDoc {
  schema: number;
  id: string;
  completeness: Completeness;
  metrics: {
    step_seconds: Record<string, number>;
    iteration_count: number;
    harness_loc: number;
    last_execution_seconds: number;
  };
  revisions: unknown[];
  applied: unknown[];
  version: number;
  project: string;
  target: { name: string; source_file: string };
}

export interface SourceDoc {
  schema: number;
  file: string;
  lines: string[];
}

export interface IterationPoll {
  schema: number;
  state: string;
  revision?: number;
  version?: number;
  error?: string;
  verdict?: string;
  report?: ReportDoc;
}

export interface EventsDoc {
  schema: number;
  cursor: number;
  events: { type: string; [key: string]: unknown }[];
}
