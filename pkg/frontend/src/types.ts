/** Wire types for the pidgraph HTTP API. */

export type GraphLevel = "complete" | "high";

export const GRAPH_LEVELS: readonly GraphLevel[] = ["complete", "high"];

/** Per-level lookup tables on a model record, e.g. {complete: 224, high: 46}. */
export type LevelCounts = Record<GraphLevel, number>;

export interface ModelRecord {
  modelId: string;
  name: string;
  created: number;
  nodes: LevelCounts;
  edges: LevelCounts;
  tokens: LevelCounts;
}

export interface GraphNodePayload {
  id: string;
  labels: string[];
  properties: Record<string, string | number | boolean>;
}

export interface GraphEdgePayload {
  source: string;
  target: string;
  type: string;
  properties: Record<string, string | number | boolean>;
}

export interface GraphPayload {
  nodes: GraphNodePayload[];
  edges: GraphEdgePayload[];
}

export interface CondensationReport {
  steps: string[];
  nodesBefore: number;
  nodesAfter: number;
  edgesBefore: number;
  edgesAfter: number;
  removals: Record<string, string[]>;
  [key: string]: unknown;
}

export interface ProviderSpecPayload {
  providerName: string;
  modelId?: string;
  endpoint?: string;
  credentialEnv?: string;
  supportsStreaming?: boolean;
}

export interface SessionRecord {
  sessionId: string;
  modelId: string;
  level: GraphLevel;
  provider: ProviderSpecPayload;
  created: number;
}

export interface HistoryMessage {
  role: "user" | "assistant";
  content: string;
}

export interface SessionDetail {
  session: SessionRecord;
  history: HistoryMessage[];
}

/** One parsed frame of the answer stream. */
export type StreamFrame =
  | { type: "token"; text: string }
  | { type: "done" }
  | { type: "error"; message: string };
