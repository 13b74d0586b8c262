/**
 * Parity harness: session output must be byte-identical to one-shot CLI
 * output, on the golden example set and on seeded random generated words.
 */

import { execFileSync } from "node:child_process";
import { afterAll, describe, expect, it } from "vitest";

import {
  ClosedSessionError,
  PhonemizerSession,
  phonemize,
  runCliOnce,
  type SessionOptions,
} from "../src/index.js";

const COMMAND = ["python3", "-m", "phonikud.cli"];

interface GoldenItem {
  hebrew: string;
  ipa: string;
  convention: "broad" | "narrow";
  stress: "syllable" | "vowel";
}

function loadGolden(): GoldenItem[] {
  const script = [
    "import json",
    "from phonikud.corpus import golden_examples",
    "items = [",
    "    {",
    "        'hebrew': e.hebrew,",
    "        'ipa': e.ipa,",
    "        'convention': e.convention.narrowness.value,",
    "        'stress': e.convention.stress_position.value,",
    "    }",
    "    for e in golden_examples()",
    "]",
    "print(json.dumps(items, ensure_ascii=False))",
  ].join("\n");
  const out = execFileSync("python3", ["-c", script], { encoding: "utf-8" });
  return JSON.parse(out) as GoldenItem[];
}

/** Deterministic PRNG (LCG), so the 1000-word corpus is reproducible. */
class Rng {
  private state: number;
  constructor(seed: number) {
    this.state = seed >>> 0;
  }
  next(): number {
    this.state = (Math.imul(this.state, 1664525) + 1013904223) >>> 0;
    return this.state / 4294967296;
  }
  int(bound: number): number {
    return Math.floor(this.next() * bound);
  }
  pick<T>(items: readonly T[]): T {
    return items[this.int(items.length)];
  }
}

const LETTERS = [..."אבגדהוזחטיכלמנסעפצקרשת"];
const VOWELS = [
  "ְ", "ֱ", "ֲ", "ֳ", "ִ", "ֵ", "ֶ",
  "ַ", "ָ", "ֹ", "ֻ",
];
const DAGESH = "ּ";
const SHIN_DOT = "ׁ";
const SIN_DOT = "ׂ";
const STRESS_MARK = "֫";
const VOCAL_SHVA = "ֽ";

function randomWord(rng: Rng): string {
  const n = 1 + rng.int(6);
  const clusters: string[] = [];
  const stressAt = rng.next() < 0.5 ? rng.int(n) : -1;
  for (let i = 0; i < n; i++) {
    const letter = rng.pick(LETTERS);
    let cluster = letter;
    if (rng.next() < 0.25) cluster += DAGESH;
    if (letter === "ש") cluster += rng.next() < 0.5 ? SHIN_DOT : SIN_DOT;
    let vowel = "";
    if (rng.next() < 0.8) {
      vowel = rng.pick(VOWELS);
      cluster += vowel;
    }
    if (i === stressAt) cluster += STRESS_MARK;
    if (vowel === "ְ" && rng.next() < 0.3) cluster += VOCAL_SHVA;
    clusters.push(cluster);
  }
  return clusters.join("");
}

function optionArgs(options: SessionOptions): string[] {
  return [
    "phonemize",
    "--convention", options.convention ?? "broad",
    "--stress", options.stress ?? "syllable",
    "--provider", options.provider ?? "passthrough",
  ];
}

const sessions = new Map<string, PhonemizerSession>();

function sessionFor(options: SessionOptions): PhonemizerSession {
  const key = JSON.stringify(options);
  let session = sessions.get(key);
  if (session === undefined) {
    session = new PhonemizerSession({ ...options, command: COMMAND });
    sessions.set(key, session);
  }
  return session;
}

afterAll(() => {
  for (const session of sessions.values()) session.close();
});

describe("golden set parity", () => {
  const golden = loadGolden();

  it("has the full golden set", () => {
    expect(golden.length).toBeGreaterThanOrEqual(10);
  });

  it("matches the expected IPA and the CLI byte-for-byte", async () => {
    for (const item of golden) {
      const options: SessionOptions = {
        convention: item.convention,
        stress: item.stress,
      };
      const viaSession = await sessionFor(options).phonemize(item.hebrew);
      expect(viaSession).toBe(item.ipa);
      const viaCli = await runCliOnce(
        COMMAND, optionArgs(options), item.hebrew + "\n");
      expect(viaSession + "\n").toBe(viaCli);
    }
  }, 120_000);
});

describe("random word parity", () => {
  it("matches the CLI on 1000 generated words", async () => {
    const rng = new Rng(0xc0ffee);
    const words: string[] = [];
    for (let i = 0; i < 1000; i++) words.push(randomWord(rng));

    const viaCli = await runCliOnce(
      COMMAND, optionArgs({}), words.map((w) => w + "\n").join(""));
    const cliLines = viaCli.split("\n");

    const session = sessionFor({});
    const viaSession = await session.phonemize(words.join("\n"));
    const sessionLines = viaSession.split("\n");

    expect(sessionLines.length).toBe(words.length);
    for (let i = 0; i < words.length; i++) {
      expect(sessionLines[i]).toBe(cliLines[i]);
    }
  }, 120_000);
});

describe("session behavior", () => {
  it("empty input round-trips", async () => {
    const out = await sessionFor({}).phonemize("");
    expect(out).toBe("");
  });

  it("normalize and applyDefaults run through the CLI", async () => {
    const session = sessionFor({});
    const word = "דִבְּר";
    const normalized = await session.normalize(word);
    expect(await session.normalize(normalized)).toBe(normalized);
    const enhanced = await session.applyDefaults(word);
    expect(enhanced).toContain(VOCAL_SHVA);
  });

  it("concurrent calls keep order", async () => {
    const session = sessionFor({});
    const golden = loadGolden().filter(
      (g) => g.convention === "broad" && g.stress === "syllable");
    const outputs = await Promise.all(
      golden.map((g) => session.phonemize(g.hebrew)));
    outputs.forEach((out, i) => expect(out).toBe(golden[i].ipa));
  }, 60_000);

  it("close() makes further calls fail cleanly", async () => {
    const session = new PhonemizerSession({ command: COMMAND });
    await session.phonemize("");
    session.close();
    await expect(session.phonemize("x")).rejects.toBeInstanceOf(
      ClosedSessionError);
    session.close(); // idempotent
  });

  it("a bad command surfaces as EngineError, not a crash", async () => {
    const session = new PhonemizerSession({
      command: ["definitely-not-a-real-binary-12345"],
    });
    await expect(session.phonemize("x")).rejects.toThrow(/failed to start/);
    session.close();
  });

  it("one-shot helper works", async () => {
    const out = await phonemize("", { command: COMMAND });
    expect(out).toBe("");
  });
});
