import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiError, ReviewApi } from "../src/api";
import { QueueState } from "../src/state";
import { ReviewItem } from "../src/types";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

const QUEUE: ReviewItem[] = [
  {
    item_id: "b0fcfb9b71528c23",
    corpus: "chicago",
    term: "group",
    status: "unmapped",
    tried: ["Group_(mathematics)", "Group"],
    context: null,
    candidates: [],
  },
];

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ReviewApi", () => {
  it("fetches the queue", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(200, QUEUE));
    vi.stubGlobal("fetch", fetchMock);
    const api = new ReviewApi("");
    const items = await api.getQueue();
    expect(fetchMock).toHaveBeenCalledWith("/api/queue");
    expect(items[0].term).toBe("group");
  });

  it("passes the status filter", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(200, []));
    vi.stubGlobal("fetch", fetchMock);
    await new ReviewApi("").getQueue("unmapped");
    expect(fetchMock).toHaveBeenCalledWith("/api/queue?status=unmapped");
  });

  it("posts decisions as JSON", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(200, { ok: true }));
    vi.stubGlobal("fetch", fetchMock);
    await new ReviewApi("").postDecision({
      item_id: "b0fcfb9b71528c23",
      action: "accept",
      qid: "Q83478",
    });
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("/api/decision");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body).qid).toBe("Q83478");
  });

  it("maps error bodies to ApiError", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(409, { detail: "terminal decision exists" }));
    vi.stubGlobal("fetch", fetchMock);
    await expect(
      new ReviewApi("").postDecision({ item_id: "x", action: "reject" }),
    ).rejects.toMatchObject({ status: 409, detail: "terminal decision exists" });
  });

  it("accept flow decrements the queue by one (server contract echo)", async () => {
    // Fake server: queue of one item; accepting removes it.
    const fetchMock = vi
      .fn()
      .mockResolvedValueOnce(jsonResponse(200, QUEUE))
      .mockResolvedValueOnce(jsonResponse(200, { ok: true }))
      .mockResolvedValueOnce(jsonResponse(200, []));
    vi.stubGlobal("fetch", fetchMock);

    const api = new ReviewApi("");
    const state = new QueueState();
    state.load(await api.getQueue());
    expect(state.size()).toBe(1);

    await api.postDecision({ item_id: QUEUE[0].item_id, action: "accept", qid: "Q83478" });
    state.removeCurrent();
    expect(state.size()).toBe(0);

    // A reload reconstructs the same view from the server.
    state.load(await api.getQueue());
    expect(state.size()).toBe(0);
  });

  it("surfaces network failures for the retry banner", async () => {
    vi.stubGlobal("fetch", vi.fn().mockRejectedValue(new TypeError("fetch failed")));
    await expect(new ReviewApi("").getQueue()).rejects.toBeInstanceOf(TypeError);
  });

  it("ApiError formats status and detail", () => {
    const error = new ApiError(400, "malformed qid");
    expect(error.message).toContain("400");
    expect(error.message).toContain("malformed qid");
  });
});
