/**
 * Test harness: runs the real analysis service as a subprocess and
 * exposes a node:http transport for the client under test.
 *
 * The explorer is exercised against the live HTTP API — nothing is
 * mocked — so these tests double as an end-to-end check of the wire
 * contract.
 */

import { ChildProcess, spawn } from "node:child_process";
import http from "node:http";
import net from "node:net";

import { HttpSend } from "../src/api.js";

/** node:http implementation of the client transport (no CORS layer). */
export const nodeSend: HttpSend = (method, url, body) =>
  new Promise((resolve, reject) => {
    const request = http.request(
      url,
      {
        method,
        headers:
          body === undefined
            ? {}
            : {
                "content-type": "application/json",
                "content-length": Buffer.byteLength(body),
              },
      },
      (response) => {
        const chunks: Buffer[] = [];
        response.on("data", (chunk: Buffer) => chunks.push(chunk));
        response.on("end", () =>
          resolve({
            status: response.statusCode ?? 0,
            body: Buffer.concat(chunks).toString("utf-8"),
          }),
        );
      },
    );
    request.on("error", reject);
    if (body !== undefined) {
      request.write(body);
    }
    request.end();
  });

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address() as net.AddressInfo;
      probe.close(() => resolve(address.port));
    });
  });
}

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

export interface RunningService {
  url: string;
  stop: () => void;
}

/** Spawn the service and wait until it answers HTTP requests. */
export async function startService(): Promise<RunningService> {
  const port = await freePort();
  const url = `http://127.0.0.1:${port}`;
  const proc: ChildProcess = spawn(
    "python3",
    ["-m", "revpref.service", "--host", "127.0.0.1", "--port", String(port)],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  proc.stderr?.on("data", (chunk: Buffer) => {
    stderr += chunk.toString("utf-8");
  });

  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    if (proc.exitCode !== null) {
      throw new Error(`service exited with ${proc.exitCode}:\n${stderr}`);
    }
    try {
      const reply = await nodeSend("GET", `${url}/sessions/probe/analysis`);
      if (reply.status === 404) {
        return { url, stop: () => proc.kill("SIGTERM") };
      }
    } catch {
      // not listening yet
    }
    await sleep(100);
  }
  proc.kill("SIGTERM");
  throw new Error(`service did not become ready:\n${stderr}`);
}
