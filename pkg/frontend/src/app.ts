import { ApiError, ReviewApi } from "./api";
import { QueueState } from "./state";
import { DecisionAction, ItemStatus, ReviewItem } from "./types";
import { isValidQid, normalizeQidInput } from "./validate";

const STATUSES: ItemStatus[] = ["unmapped", "disambiguation_rejected", "ambiguous_merge"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export class App {
  private state = new QueueState();

  constructor(private api: ReviewApi) {}

  async start(): Promise<void> {
    this.bindKeys();
    el("retry-button").addEventListener("click", () => void this.refresh());
    el("status-filter").addEventListener("change", (event) => {
      const value = (event.target as HTMLSelectElement).value;
      this.state.setStatusFilter(value === "" ? null : (value as ItemStatus));
      this.render();
    });
    el("corpus-filter").addEventListener("change", (event) => {
      const value = (event.target as HTMLSelectElement).value;
      this.state.setCorpusFilter(value === "" ? null : value);
      this.render();
    });
    el("accept-button").addEventListener("click", () => void this.accept());
    el("reject-button").addEventListener("click", () => void this.decide("reject"));
    el("defer-button").addEventListener("click", () => void this.decide("defer"));
    (el("export-link") as HTMLAnchorElement).href = this.api.overridesExportUrl();
    await this.refresh();
  }

  private bindKeys(): void {
    document.addEventListener("keydown", (event) => {
      if (event.target instanceof HTMLInputElement || event.target instanceof HTMLTextAreaElement) return;
      switch (event.key) {
        case "a":
          el<HTMLInputElement>("qid-input").focus();
          event.preventDefault();
          break;
        case "r":
          void this.decide("reject");
          break;
        case "d":
          void this.decide("defer");
          break;
        case "j":
        case "n":
          this.state.next();
          this.render();
          break;
        case "k":
        case "p":
          this.state.previous();
          this.render();
          break;
      }
    });
    el<HTMLInputElement>("qid-input").addEventListener("keydown", (event) => {
      if (event.key === "Enter") void this.accept();
      if (event.key === "Escape") (event.target as HTMLInputElement).blur();
    });
  }

  async refresh(): Promise<void> {
    try {
      const items = await this.api.getQueue();
      this.state.load(items);
      el("retry-banner").hidden = true;
    } catch (error) {
      el("retry-banner").hidden = false;
      el("retry-message").textContent =
        error instanceof ApiError ? error.message : "cannot reach the review service";
    }
    this.render();
  }

  private async accept(): Promise<void> {
    const input = el<HTMLInputElement>("qid-input");
    const qid = normalizeQidInput(input.value);
    if (!isValidQid(qid)) {
      this.showValidation(`not a QID: "${input.value}" (expected Q followed by digits)`);
      return;
    }
    await this.decide("accept", qid);
  }

  private async decide(action: DecisionAction, qid?: string, supersede = false): Promise<void> {
    const item = this.state.current();
    if (!item) return;
    const note = el<HTMLInputElement>("note-input").value;
    try {
      await this.api.postDecision({ item_id: item.item_id, action, qid, note, supersede });
    } catch (error) {
      if (error instanceof ApiError && error.status === 409 && !supersede) {
        if (window.confirm("A terminal decision already exists. Supersede it?")) {
          await this.decide(action, qid, true);
        }
        return;
      }
      if (error instanceof ApiError && error.status === 400) {
        this.showValidation(error.detail);
        return;
      }
      el("retry-banner").hidden = false;
      el("retry-message").textContent = error instanceof Error ? error.message : String(error);
      return;
    }
    this.showValidation("");
    el<HTMLInputElement>("qid-input").value = "";
    el<HTMLInputElement>("note-input").value = "";
    if (action === "accept" || action === "reject") {
      this.state.removeCurrent();
    } else {
      this.state.next();
    }
    this.render();
  }

  private showValidation(message: string): void {
    const node = el("validation-message");
    node.textContent = message;
    node.hidden = message === "";
  }

  render(): void {
    const counts = this.state.countsByStatus();
    el("queue-summary").textContent =
      this.state.size() === 0
        ? "nothing to review"
        : STATUSES.filter((s) => counts[s])
            .map((s) => `${s}: ${counts[s]}`)
            .join("  ·  ");

    const corpusFilter = el<HTMLSelectElement>("corpus-filter");
    const known = new Set(Array.from(corpusFilter.options).map((o) => o.value));
    for (const corpus of this.state.corpora()) {
      if (!known.has(corpus)) {
        const option = document.createElement("option");
        option.value = corpus;
        option.textContent = corpus;
        corpusFilter.appendChild(option);
      }
    }

    const list = el("queue-list");
    const current = this.state.current();
    list.innerHTML = this.state
      .visible()
      .map(
        (item) =>
          `<li data-id="${item.item_id}" class="${item.item_id === current?.item_id ? "selected" : ""}">` +
          `<span class="badge ${item.status}">${item.status.replace("_", " ")}</span> ` +
          `<span class="corpus">${escapeHtml(item.corpus)}</span> ${escapeHtml(item.term)}</li>`,
      )
      .join("");
    list.querySelectorAll("li").forEach((row) => {
      row.addEventListener("click", () => {
        this.state.select(row.dataset.id ?? "");
        this.render();
      });
    });

    this.renderPanel(current);
  }

  private renderPanel(item: ReviewItem | null): void {
    const panel = el("decision-panel");
    panel.hidden = item === null;
    el("empty-state").hidden = item !== null;
    if (!item) return;
    el("item-term").textContent = item.term;
    el("item-meta").textContent = `${item.corpus} · ${item.status.replace("_", " ")}`;
    el("item-context").textContent = item.context ?? "";
    el("item-context").hidden = !item.context;

    el("tried-list").innerHTML = item.tried.map((t) => `<li>${escapeHtml(t)}</li>`).join("");
    el("candidate-list").innerHTML = item.candidates
      .map((candidate) => {
        const label = candidate.label ? ` — ${escapeHtml(candidate.label)}` : "";
        const desc = candidate.description ? `<small>${escapeHtml(candidate.description)}</small>` : "";
        const flag = candidate.is_disambiguation ? ' <span class="badge disambiguation">disambiguation</span>' : "";
        return (
          `<li><button class="pick" data-qid="${candidate.qid}">${candidate.qid}</button>` +
          `<a href="https://www.wikidata.org/wiki/${candidate.qid}" target="_blank" rel="noopener">↗</a>` +
          `${label}${flag} ${desc}</li>`
        );
      })
      .join("");
    el("candidate-list")
      .querySelectorAll<HTMLButtonElement>("button.pick")
      .forEach((button) => {
        button.addEventListener("click", () => {
          el<HTMLInputElement>("qid-input").value = button.dataset.qid ?? "";
        });
      });
  }
}

export function boot(): void {
  const app = new App(new ReviewApi(""));
  void app.start();
}
