// Spawns the real Python service for the integration test and builds the
// synthetic fixture bundle with the repo's own script.

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

const REPO_ROOT = resolve(__dirname, "..", "..");

export interface RunningService {
  baseUrl: string;
  stop: () => void;
}

export function makeFixtureBundle(): Uint8Array {
  const dir = mkdtempSync(join(tmpdir(), "teasercut-ui-"));
  const out = join(dir, "bundle.json");
  const result = spawnSync(
    "python3",
    [join(REPO_ROOT, "scripts", "make_fixture.py"), "--out", out],
    { encoding: "utf-8" },
  );
  if (result.status !== 0) {
    throw new Error(`fixture generation failed: ${result.stderr}`);
  }
  return new Uint8Array(readFileSync(out));
}

export async function startService(): Promise<RunningService> {
  const storeDir = mkdtempSync(join(tmpdir(), "teasercut-store-"));
  const child: ChildProcess = spawn("python3", ["-m", "teasercut.service"], {
    env: { ...process.env, STORE_DIR: storeDir, BIND_ADDR: "127.0.0.1:0" },
    stdio: ["ignore", "pipe", "pipe"],
  });

  const baseUrl = await new Promise<string>((resolvePromise, rejectPromise) => {
    let log = "";
    const watch = (chunk: Buffer) => {
      log += chunk.toString();
      const match = log.match(/running on (http:\/\/127\.0\.0\.1:\d+)/i);
      if (match) resolvePromise(match[1]);
    };
    child.stdout?.on("data", watch);
    child.stderr?.on("data", watch);
    child.on("exit", (code) => rejectPromise(new Error(`service exited early (${code}): ${log}`)));
    setTimeout(() => rejectPromise(new Error(`service did not start: ${log}`)), 30_000);
  });

  // the port is open before uvicorn logs readiness, but double-check
  for (let attempt = 0; attempt < 50; attempt++) {
    try {
      const response = await fetch(baseUrl + "/docs");
      if (response.ok) break;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }

  return {
    baseUrl,
    stop: () => {
      child.kill("SIGTERM");
    },
  };
}
