// Command-line front end: train a chunk classifier on an encoded dataset,
// or emit verdict files for one.
//
//   node dist/cli.js train   --data images/ --out model/ [--epochs 25]
//       [--lr 1e-4] [--batch 32] [--decay 1e-4] [--seed 0]
//   node dist/cli.js predict --model model/ --data images/ --out verdicts/

import { loadDataset } from "./dataset";
import { predictToDir } from "./predict";
import { DEFAULT_SPEC, trainToDir } from "./train";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`expected "--flag value" pairs, got ${argv[i]}`);
    }
    flags.set(argv[i].slice(2), argv[i + 1]);
  }
  return flags;
}

function required(flags: Map<string, string>, name: string): string {
  const value = flags.get(name);
  if (value === undefined) throw new Error(`missing required --${name}`);
  return value;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (command !== "train" && command !== "predict") {
    console.error("usage: cli.js {train|predict} --flag value ...");
    return 2;
  }
  let flags: Map<string, string>;
  try {
    flags = parseFlags(rest);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }

  try {
    if (command === "train") {
      const dataset = loadDataset(required(flags, "data"));
      const spec = {
        epochs: Number(flags.get("epochs") ?? DEFAULT_SPEC.epochs),
        learningRate: Number(flags.get("lr") ?? DEFAULT_SPEC.learningRate),
        batchSize: Number(flags.get("batch") ?? DEFAULT_SPEC.batchSize),
        weightDecay: Number(flags.get("decay") ?? DEFAULT_SPEC.weightDecay),
        seed: Number(flags.get("seed") ?? DEFAULT_SPEC.seed),
      };
      const out = required(flags, "out");
      const result = await trainToDir(dataset, spec, out);
      console.log(`saved model to ${out} ` +
                  `(train accuracy ${(result.finalAccuracy * 100).toFixed(2)}%)`);
    } else {
      const dataset = loadDataset(required(flags, "data"));
      const result = await predictToDir(required(flags, "model"), dataset,
                                        required(flags, "out"));
      console.log(`wrote ${result.written.length} verdict files`);
    }
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

main().then((code) => { process.exitCode = code; });
