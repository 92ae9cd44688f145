// Spawns the real risk-engine service for integration tests.

import { spawn, execFileSync, type ChildProcess } from 'node:child_process';

export interface ServiceHandle {
  baseUrl: string;
  stop: () => void;
}

export async function startService(port: number, extraArgs: string[] = []): Promise<ServiceHandle> {
  const child: ChildProcess = spawn(
    'python3',
    ['-m', 'ninedim.cli', 'serve', '--bind', `127.0.0.1:${port}`, ...extraArgs],
    { stdio: ['ignore', 'pipe', 'pipe'] },
  );
  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${baseUrl}/corpus`);
      if (response.ok) {
        return { baseUrl, stop: () => child.kill('SIGTERM') };
      }
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  child.kill('SIGTERM');
  throw new Error(`service did not come up on ${baseUrl}: ${lastError}`);
}

export function python(args: string[]): string {
  return execFileSync('python3', args, { encoding: 'utf-8' });
}

export function corpusDir(): string {
  return python(['-c', 'from ninedim.corpus import default_corpus_dir; print(default_corpus_dir())']).trim();
}
