/** Widget logic kept free of the DOM: clock text, chat merging, calculator. */

export interface ChatMessage {
  seq: number;
  sender: string;
  ts: string;
  text: string;
}

/** Local wall-clock rendering for the label-based clock component. */
export function clockText(now: Date): string {
  const pad = (n: number) => String(n).padStart(2, "0");
  return `${pad(now.getHours())}:${pad(now.getMinutes())}:${pad(now.getSeconds())}`;
}

/**
 * Merge a polled batch into the local transcript: drop duplicates by
 * seq, keep ascending order.  Returns the new transcript and cursor.
 */
export function mergeMessages(
  existing: ChatMessage[],
  incoming: ChatMessage[],
): { messages: ChatMessage[]; cursor: number } {
  const seen = new Set(existing.map((m) => m.seq));
  const merged = existing.slice();
  for (const message of incoming) {
    if (!seen.has(message.seq)) {
      seen.add(message.seq);
      merged.push(message);
    }
  }
  merged.sort((a, b) => a.seq - b.seq);
  const cursor = merged.length ? merged[merged.length - 1].seq : 0;
  return { messages: merged, cursor };
}

/** Tiny arithmetic evaluator for the calculator panel: + - * / and parens. */
export function calculate(expression: string): number {
  let pos = 0;
  const text = expression.replace(/\s+/g, "");

  function parseExpr(): number {
    let value = parseTerm();
    while (text[pos] === "+" || text[pos] === "-") {
      const op = text[pos++];
      const rhs = parseTerm();
      value = op === "+" ? value + rhs : value - rhs;
    }
    return value;
  }

  function parseTerm(): number {
    let value = parseAtom();
    while (text[pos] === "*" || text[pos] === "/") {
      const op = text[pos++];
      const rhs = parseAtom();
      value = op === "*" ? value * rhs : value / rhs;
    }
    return value;
  }

  function parseAtom(): number {
    if (text[pos] === "(") {
      pos++;
      const value = parseExpr();
      if (text[pos] !== ")") throw new Error("expected ')'");
      pos++;
      return value;
    }
    if (text[pos] === "-") {
      pos++;
      return -parseAtom();
    }
    const start = pos;
    while (pos < text.length && /[0-9.]/.test(text[pos])) pos++;
    if (start === pos) throw new Error(`unexpected '${text[pos] ?? "end"}'`);
    const value = Number(text.slice(start, pos));
    if (!Number.isFinite(value)) throw new Error("bad number");
    return value;
  }

  const result = parseExpr();
  if (pos !== text.length) throw new Error(`unexpected '${text[pos]}'`);
  return result;
}
