// SMT-LIB 2 REPL over the z3-solver WASM build.
//
// Reads commands from stdin, evaluates each complete top-level s-expression
// against a single persistent Z3 context, and writes the solver's replies to
// stdout.  State (declarations, assertions, push/pop scopes) persists across
// commands, so a driving process can treat this exactly like `z3 -in`.

'use strict';

const { init } = require('z3-solver');

// Splits a buffer into complete top-level s-expressions.  Respects string
// literals ("" escapes), quoted symbols (|...|), and ; line comments.  Returns
// [commands, rest] where rest is the unconsumed tail.
function splitCommands(buf) {
  const out = [];
  let depth = 0;
  let start = 0;
  let i = 0;
  let inString = false;
  let inQuoted = false;
  let inComment = false;
  while (i < buf.length) {
    const c = buf[i];
    if (inComment) {
      if (c === '\n') inComment = false;
    } else if (inString) {
      if (c === '"') {
        if (buf[i + 1] === '"') i++; // escaped quote
        else inString = false;
      }
    } else if (inQuoted) {
      if (c === '|') inQuoted = false;
    } else if (c === '"') {
      inString = true;
    } else if (c === '|') {
      inQuoted = true;
    } else if (c === ';') {
      inComment = true;
    } else if (c === '(') {
      if (depth === 0) start = i;
      depth++;
    } else if (c === ')') {
      depth--;
      if (depth === 0) {
        out.push(buf.slice(start, i + 1));
        start = i + 1;
      }
      if (depth < 0) depth = 0; // tolerate stray ')'
    }
    i++;
  }
  return [out, depth === 0 ? buf.slice(start).replace(/^[\s]*/, '') : buf.slice(start)];
}

async function main() {
  const { Z3, em } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);
  Z3.del_config(cfg);

  let pending = '';
  let queue = Promise.resolve();
  let done = false;

  const run = (cmd) => {
    queue = queue.then(async () => {
      if (done) return;
      if (/^\(\s*exit\s*\)$/.test(cmd)) {
        done = true;
        process.stdout.write('', () => process.exit(0));
        // Give the write a moment; force-exit regardless.
        setTimeout(() => process.exit(0), 50);
        return;
      }
      let reply;
      try {
        reply = await Z3.eval_smtlib2_string(ctx, cmd);
      } catch (e) {
        reply = '(error "' + String(e && e.message ? e.message : e).replace(/"/g, "'") + '")\n';
      }
      if (process.env.Z3SHIM_DEBUG && reply && reply.indexOf('(error') !== -1) {
        process.stderr.write('z3shim: error reply ' + JSON.stringify(reply) +
                             ' for cmd ' + JSON.stringify(cmd) + '\n');
      }
      if (reply && reply.length > 0) {
        if (!reply.endsWith('\n')) reply += '\n';
        process.stdout.write(reply);
      }
    });
  };

  process.stdin.setEncoding('utf8');
  process.stdin.on('data', (chunk) => {
    pending += chunk;
    const [cmds, rest] = splitCommands(pending);
    pending = rest;
    // Evaluate consecutive commands as one batch: replies come back in order
    // either way, and fewer eval round-trips means fewer chances for the
    // engine to hiccup between commands.  (exit) still needs interception.
    let batch = [];
    const flush = () => {
      if (batch.length) {
        run(batch.join('\n'));
        batch = [];
      }
    };
    for (const c of cmds) {
      if (/^\(\s*exit\s*\)$/.test(c)) {
        flush();
        run(c);
      } else {
        batch.push(c);
      }
    }
    flush();
  });
  process.stdin.on('end', () => {
    queue = queue.then(() => {
      if (!done) process.exit(0);
    });
  });
}

main().catch((e) => {
  process.stderr.write('z3shim: fatal: ' + String(e && e.stack ? e.stack : e) + '\n');
  process.exit(1);
});
