import { ApiClient, ServiceUnreachableError } from "./api";
import { AnnotationEditor } from "./editor";
import type { ProblemDetail, ProblemSummary } from "./types";

const client = new ApiClient();

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function root(): HTMLElement {
  const node = document.getElementById("app");
  if (!node) throw new Error("missing #app container");
  return node;
}

function showError(message: string): void {
  const banner = el("div", "banner error", message);
  root().prepend(banner);
}

/** Char offset of a DOM position inside the rendered problem text. */
function textOffset(container: HTMLElement, node: Node, offset: number): number {
  let total = 0;
  const walker = document.createTreeWalker(container, NodeFilter.SHOW_TEXT);
  for (let t = walker.nextNode(); t; t = walker.nextNode()) {
    if (t === node) return total + offset;
    total += (t.textContent ?? "").length;
  }
  return total;
}

async function renderList(): Promise<void> {
  const app = root();
  app.replaceChildren();
  let page;
  let progress;
  try {
    [page, progress] = await Promise.all([
      client.listProblems(undefined, 0, 500),
      client.progress(),
    ]);
  } catch (err) {
    if (err instanceof ServiceUnreachableError) {
      showError("Cannot reach the annotation service.");
      return;
    }
    throw err;
  }

  app.append(el("h1", undefined, "Problems"));
  app.append(
    el(
      "p",
      "progress",
      `${progress.labeled} labeled, ${progress.unclear} unclear, ` +
        `${progress.unlabeled} of ${progress.total} remaining`,
    ),
  );
  if (page.items.length === 0) {
    app.append(el("p", "empty", "No problems loaded."));
    return;
  }
  // unlabeled first, then labeled, then unclear
  const order: Record<ProblemSummary["status"], number> = {
    unlabeled: 0,
    labeled: 1,
    unclear: 2,
  };
  const items = [...page.items].sort(
    (a, b) => order[a.status] - order[b.status] || a.id.localeCompare(b.id),
  );
  const list = el("ul", "problem-list");
  for (const item of items) {
    const row = el("li", `status-${item.status}`);
    const link = el("a", undefined, `${item.id} (${item.n_sentences} sentences)`);
    link.href = `#/problem/${encodeURIComponent(item.id)}`;
    row.append(link, el("span", "badge", item.status));
    list.append(row);
  }
  app.append(list);
}

async function renderProblem(problemId: string): Promise<void> {
  const app = root();
  app.replaceChildren();
  let detail: ProblemDetail;
  try {
    detail = await client.getProblem(problemId);
  } catch (err) {
    if (err instanceof ServiceUnreachableError) {
      showError("Cannot reach the annotation service.");
      return;
    }
    throw err;
  }
  const editor = new AnnotationEditor(client, detail);

  const title = el("h1", undefined, detail.id);
  const message = el("div", "banner hidden");
  const textBox = el("div", "problem-text");
  // subtle sentence boundary markers: annotators see the downstream unit
  for (const s of detail.sentences) {
    const sentence = el("span", "sentence", s.text);
    sentence.dataset.index = String(s.index);
    textBox.append(sentence, document.createTextNode(" "));
  }

  const spanList = el("ul", "span-list");
  const unclearBox = el("input") as HTMLInputElement;
  unclearBox.type = "checkbox";
  const unclearLabel = el("label", "unclear-toggle");
  unclearLabel.append(unclearBox, document.createTextNode(" unclear"));
  const saveButton = el("button", "save", "Save");
  const backLink = el("a", "back", "Back to list");
  backLink.href = "#/";

  function note(kind: "info" | "error", text: string): void {
    message.className = `banner ${kind}`;
    message.textContent = text;
  }

  function redraw(): void {
    spanList.replaceChildren();
    editor.spans.forEach((span, i) => {
      const row = el("li");
      row.append(
        el("span", "span-text", `"${span.text}" (sentence ${span.sentence_index})`),
      );
      const remove = el("button", "remove", "remove");
      remove.addEventListener("click", () => editor.removeSpan(i));
      row.append(remove);
      spanList.append(row);
    });
    unclearBox.checked = editor.unclear;
    saveButton.disabled = editor.inFlight;
    const labels = editor.labels;
    textBox.querySelectorAll<HTMLElement>(".sentence").forEach((node) => {
      const idx = Number(node.dataset.index);
      node.classList.toggle("has-unknown", labels[idx] === 1);
    });
  }

  editor.onEvent((event) => {
    switch (event.kind) {
      case "changed":
        redraw();
        break;
      case "saved":
        note("info", `Saved (revision ${event.revision}).`);
        redraw();
        break;
      case "conflict":
        note(
          "error",
          "Someone else saved this problem first; it was reloaded. " +
            "Re-apply your spans and save again.",
        );
        redraw();
        break;
      case "rejected":
        note("error", event.message);
        break;
    }
  });

  textBox.addEventListener("mouseup", () => {
    const selection = window.getSelection();
    if (!selection || selection.isCollapsed || selection.rangeCount === 0) return;
    const range = selection.getRangeAt(0);
    const anchor = textOffset(textBox, range.startContainer, range.startOffset);
    const focus = textOffset(textBox, range.endContainer, range.endOffset);
    editor.addSelection(anchor, focus);
    selection.removeAllRanges();
  });

  unclearBox.addEventListener("change", () => {
    const applied = editor.setUnclear(unclearBox.checked, () =>
      window.confirm("Marking unclear removes the current spans. Continue?"),
    );
    if (!applied) unclearBox.checked = editor.unclear;
  });

  saveButton.addEventListener("click", () => void editor.save());
  document.onkeydown = (event) => {
    if ((event.ctrlKey || event.metaKey) && event.key === "s") {
      event.preventDefault();
      void editor.save();
    }
    if ((event.ctrlKey || event.metaKey) && event.key === "ArrowRight") {
      event.preventDefault();
      void editor.save().then(() => {
        window.location.hash = "#/";
      });
    }
  };

  app.append(title, message, textBox, spanList, unclearLabel, saveButton, backLink);
  redraw();
}

export function route(): void {
  const hash = window.location.hash;
  const match = /^#\/problem\/(.+)$/.exec(hash);
  if (match) {
    void renderProblem(decodeURIComponent(match[1]));
  } else {
    void renderList();
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.addEventListener("hashchange", route);
  window.addEventListener("DOMContentLoaded", route);
}
