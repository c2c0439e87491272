#!/usr/bin/env node
// Runs an SMT-LIB v2 script through the z3 wasm build and prints the solver
// output. The script comes from the file given as the first argument, or from
// stdin when no argument (or "-") is given.
'use strict';

const fs = require('fs');

function readInput() {
  const arg = process.argv[2];
  if (arg && arg !== '-') return fs.readFileSync(arg, 'utf8');
  return fs.readFileSync(0, 'utf8');
}

(async () => {
  const script = readInput();
  const { init } = require('z3-solver');
  const { Z3, em } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);
  let out;
  try {
    out = await Z3.eval_smtlib2_string(ctx, script);
  } catch (e) {
    process.stdout.write('error\n');
    process.stderr.write(String(e && e.message ? e.message : e) + '\n');
    process.exit(1);
  }
  process.stdout.write(out.endsWith('\n') ? out : out + '\n');
  if (em && em.PThread && em.PThread.terminateAllThreads) {
    em.PThread.terminateAllThreads();
  }
  process.exit(0);
})().catch((e) => {
  process.stderr.write(String(e && e.stack ? e.stack : e) + '\n');
  process.exit(1);
});
