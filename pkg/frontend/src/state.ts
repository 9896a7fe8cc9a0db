import { ItemStatus, ReviewItem } from "./types";

export interface Filters {
  status: ItemStatus | null;
  corpus: string | null;
}

/** In-memory view over the queue fetched from the server.  Pure data
 * transitions live here so they can be tested without a DOM; a full page
 * reload reconstructs everything from the API. */
export class QueueState {
  private items: ReviewItem[] = [];
  private cursor = 0;
  filters: Filters = { status: null, corpus: null };

  load(items: ReviewItem[]): void {
    this.items = [...items];
    this.cursor = 0;
  }

  visible(): ReviewItem[] {
    return this.items.filter(
      (item) =>
        (this.filters.status === null || item.status === this.filters.status) &&
        (this.filters.corpus === null || item.corpus === this.filters.corpus),
    );
  }

  current(): ReviewItem | null {
    const rows = this.visible();
    if (rows.length === 0) return null;
    if (this.cursor >= rows.length) this.cursor = rows.length - 1;
    return rows[this.cursor];
  }

  select(itemId: string): void {
    const index = this.visible().findIndex((item) => item.item_id === itemId);
    if (index >= 0) this.cursor = index;
  }

  next(): void {
    const count = this.visible().length;
    if (count > 0) this.cursor = Math.min(this.cursor + 1, count - 1);
  }

  previous(): void {
    if (this.cursor > 0) this.cursor -= 1;
  }

  /** Drop a terminally decided item and keep the cursor on the following
   * row, so the curator flows through the queue. */
  removeCurrent(): void {
    const current = this.current();
    if (!current) return;
    this.items = this.items.filter((item) => item.item_id !== current.item_id);
  }

  setStatusFilter(status: ItemStatus | null): void {
    this.filters.status = status;
    this.cursor = 0;
  }

  setCorpusFilter(corpus: string | null): void {
    this.filters.corpus = corpus;
    this.cursor = 0;
  }

  corpora(): string[] {
    return [...new Set(this.items.map((item) => item.corpus))].sort();
  }

  countsByStatus(): Record<string, number> {
    const counts: Record<string, number> = {};
    for (const item of this.items) {
      counts[item.status] = (counts[item.status] ?? 0) + 1;
    }
    return counts;
  }

  size(): number {
    return this.items.length;
  }
}
