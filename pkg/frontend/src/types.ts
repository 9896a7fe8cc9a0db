export type ItemStatus = "unmapped" | "disambiguation_rejected" | "ambiguous_merge";

export interface Candidate {
  qid: string;
  label: string | null;
  description: string | null;
  is_disambiguation: boolean;
}

export interface ReviewItem {
  item_id: string;
  corpus: string;
  term: string;
  status: ItemStatus;
  tried: string[];
  context: string | null;
  candidates: Candidate[];
}

export type DecisionAction = "accept" | "reject" | "defer";

export interface DecisionRequest {
  item_id: string;
  action: DecisionAction;
  qid?: string;
  note?: string;
  supersede?: boolean;
}

export interface QueueStats {
  items: number;
  queued: number;
  queued_by_status: Record<ItemStatus, number>;
  decisions: number;
  terminally_decided: number;
}
