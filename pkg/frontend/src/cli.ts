#!/usr/bin/env node
import { readFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { embedBatch } from "./embed.js";
import { HASH_MODEL, HashEncoder, ModelLoadError, loadClipEncoder, type Encoder } from "./encoder.js";
import { RequestError, parseEmbedRequest } from "./schema.js";
import { writeEmbeddingTable } from "./writer.js";

export const EXIT_OK = 0;
export const EXIT_USAGE = 1;
export const EXIT_DATA = 2;
export const EXIT_MODEL = 3;

const USAGE = `usage: embed --input requests.json --out embeds [options]

Encode the text labels and image crops listed in requests.json and write
embeds.json + embeds.bin in the localization package's embedding layout.

options:
  --input PATH       request document (required)
  --out PATH         output base name; .json/.bin suffixes are added (required)
  --model NAME       override the request's model_name
                     ("${HASH_MODEL}" selects the deterministic hash encoder)
  --dim N            vector size for the hash encoder (default 768)
  --batch-size N     encoder chunk size (default 16)
  --help             show this message
`;

interface CliArgs {
  input: string;
  out: string;
  model?: string;
  dim: number;
  batchSize: number;
}

class UsageError extends Error {}

function parseArgs(argv: string[]): CliArgs | "help" {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--help" || arg === "-h") return "help";
    if (!arg.startsWith("--")) throw new UsageError(`unexpected argument '${arg}'`);
    const key = arg.slice(2);
    if (!["input", "out", "model", "dim", "batch-size"].includes(key)) {
      throw new UsageError(`unknown option '${arg}'`);
    }
    const value = argv[++i];
    if (value === undefined) throw new UsageError(`option '${arg}' needs a value`);
    values.set(key, value);
  }
  const input = values.get("input");
  const out = values.get("out");
  if (!input || !out) throw new UsageError("--input and --out are required");
  const dim = Number(values.get("dim") ?? "768");
  const batchSize = Number(values.get("batch-size") ?? "16");
  if (!Number.isInteger(dim) || dim < 1) throw new UsageError("--dim must be a positive integer");
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new UsageError("--batch-size must be a positive integer");
  }
  return { input, out, model: values.get("model"), dim, batchSize };
}

async function encoderFor(modelName: string, dim: number): Promise<Encoder> {
  if (modelName === HASH_MODEL) return new HashEncoder(dim);
  return loadClipEncoder(modelName);
}

export async function main(argv: string[]): Promise<number> {
  let args: CliArgs | "help";
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`embed: ${err.message}`);
      console.error(USAGE);
      return EXIT_USAGE;
    }
    throw err;
  }
  if (args === "help") {
    console.log(USAGE);
    return EXIT_OK;
  }

  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(args.input, "utf8"));
  } catch (err) {
    console.error(`embed: ${args.input}: ${String(err)}`);
    return EXIT_DATA;
  }

  try {
    const req = parseEmbedRequest(doc);
    const encoder = await encoderFor(args.model ?? req.model_name, args.dim);
    const result = await embedBatch(req, encoder, {
      batchSize: args.batchSize,
      warn: (message) => console.error(`embed: ${message}`),
    });
    if (result.ids.length === 0) {
      console.error("embed: every item was skipped, nothing to write");
      return EXIT_DATA;
    }
    const written = writeEmbeddingTable(args.out, result.ids, result.vectors);
    console.log(
      `wrote ${written.count} embeddings (dim ${written.dim}, model ${encoder.name}) ` +
        `to ${written.jsonPath} + ${written.binPath}`
    );
    if (result.skipped.length > 0) {
      console.error(`embed: skipped ${result.skipped.length} item(s)`);
    }
    return EXIT_OK;
  } catch (err) {
    if (err instanceof ModelLoadError) {
      console.error(`embed: ${err.message}`);
      return EXIT_MODEL;
    }
    if (err instanceof RequestError || err instanceof Error) {
      console.error(`embed: ${err.message}`);
      return EXIT_DATA;
    }
    throw err;
  }
}

const entry = process.argv[1] ? pathToFileURL(process.argv[1]).href : "";
if (import.meta.url === entry) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
