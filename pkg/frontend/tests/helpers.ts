import { spawn, type ChildProcess } from "node:child_process";

export interface RunningService {
  port: number;
  baseUrl: string;
  stop: () => void;
}

/** Start the Python planning service on a random port and wait for health. */
export async function startService(): Promise<RunningService> {
  const port = 20000 + Math.floor(Math.random() * 20000);
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "testrisk.cli", "serve", "--port", String(port)],
    { cwd: "..", stdio: ["ignore", "ignore", "pipe"] }
  );
  let stderr = "";
  child.stderr?.on("data", (chunk) => {
    stderr += String(chunk);
  });
  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 20000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early (code ${child.exitCode}): ${stderr}`);
    }
    try {
      const response = await fetch(`${baseUrl}/api/health`);
      if (response.ok) {
        return { port, baseUrl, stop: () => child.kill("SIGTERM") };
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  child.kill("SIGTERM");
  throw new Error(`service did not become healthy: ${stderr}`);
}
