import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { AnnotationEditor } from "../src/editor";
import type { EditorEvent } from "../src/editor";
import { FakeServer, twoSentenceProblem } from "./fake_server";

async function makeEditor(server?: FakeServer) {
  const srv = server ?? new FakeServer([twoSentenceProblem()]);
  const client = new ApiClient("", srv.fetch);
  const editor = new AnnotationEditor(client, await client.getProblem("p1"));
  const events: EditorEvent[] = [];
  editor.onEvent((e) => events.push(e));
  return { server: srv, client, editor, events };
}

describe("AnnotationEditor", () => {
  it("adds spans from selections and derives labels", async () => {
    const { editor } = await makeEditor();
    expect(editor.addSelection(39, 18)).toBe(true); // reversed endpoints
    expect(editor.spans).toHaveLength(1);
    expect(editor.labels).toEqual([0, 1]);
  });

  it("rejects invalid selections with a message", async () => {
    const { editor, events } = await makeEditor();
    expect(editor.addSelection(17, 18)).toBe(false);
    expect(events.at(-1)).toMatchObject({ kind: "rejected" });
  });

  it("adds spans from free text that matches a substring", async () => {
    const { editor } = await makeEditor();
    expect(editor.addText("the variance")).toBe(true);
    expect(editor.addText("no such words")).toBe(false);
    expect(editor.spans).toHaveLength(1);
  });

  it("unclear clears spans only after confirmation", async () => {
    const { editor } = await makeEditor();
    editor.addSelection(18, 39);
    expect(editor.setUnclear(true, () => false)).toBe(false);
    expect(editor.spans).toHaveLength(1);
    expect(editor.unclear).toBe(false);

    expect(editor.setUnclear(true, () => true)).toBe(true);
    expect(editor.spans).toHaveLength(0);
    expect(editor.unclear).toBe(true);

    // spans are rejected while unclear is set
    expect(editor.addSelection(18, 39)).toBe(false);
  });

  it("save bumps the revision and reports success", async () => {
    const { editor, events } = await makeEditor();
    editor.addSelection(18, 39);
    expect(await editor.save()).toBe(true);
    expect(editor.revision).toBe(1);
    expect(events.at(-1)).toMatchObject({ kind: "saved", revision: 1 });
  });

  it("only one mutation is in flight at a time", async () => {
    const { editor } = await makeEditor();
    editor.addSelection(18, 39);
    const [first, second] = await Promise.all([editor.save(), editor.save()]);
    expect(first).toBe(true);
    expect(second).toBe(false);
    expect(editor.revision).toBe(1);
  });

  it("two concurrent clients: stale save conflicts, reloads, then succeeds", async () => {
    const server = new FakeServer([twoSentenceProblem()]);
    const a = await makeEditor(server);
    const b = await makeEditor(server);

    a.editor.addSelection(18, 39);
    expect(await a.editor.save()).toBe(true);

    b.editor.setUnclear(true, () => true);
    expect(await b.editor.save()).toBe(false);
    expect(b.editor.conflict).toContain("stale");
    expect(b.events.at(-1)).toMatchObject({ kind: "conflict" });
    // the conflicting editor reloaded the fresh revision
    expect(b.editor.revision).toBe(1);

    b.editor.setUnclear(true, () => true);
    expect(await b.editor.save()).toBe(true);
    expect(b.editor.revision).toBe(2);
  });

  it("round trip: a fresh load reproduces the saved state", async () => {
    const { client, editor } = await makeEditor();
    editor.addSelection(18, 39);
    await editor.save();
    const fresh = new AnnotationEditor(client, await client.getProblem("p1"));
    expect(fresh.spans).toEqual(editor.spans);
    expect(fresh.revision).toBe(editor.revision);
    expect(fresh.unclear).toBe(false);
  });
});
