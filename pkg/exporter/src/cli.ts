#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { runExport } from "./export";

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .scriptName("export_vgg16")
    .option("weights-out", { type: "string", demandOption: true })
    .option("goldens-out", { type: "string", demandOption: true })
    .option("fixtures", { type: "string", demandOption: true })
    .option("manifest", { type: "string", demandOption: true })
    .option("seed", {
      type: "number",
      default: 1234,
      describe:
        "seed for the deterministic surrogate weights (pretrained VGG16 is " +
        "not fetchable in offline environments)",
    })
    .strict()
    .parse();

  const manifest = await runExport({
    weightsOut: argv["weights-out"],
    goldensOut: argv["goldens-out"],
    fixturesDir: argv.fixtures,
    manifestOut: argv.manifest,
    seed: argv.seed,
  });
  process.stderr.write(
    `exported ${manifest.source_model_id}: sha256 ${manifest.gvgg_sha256}\n`,
  );
}

main().catch((err) => {
  process.stderr.write(`export_vgg16: ${err}\n`);
  process.exit(1);
});
