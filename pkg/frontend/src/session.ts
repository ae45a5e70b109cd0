import { ApiClient, ProjectState } from "./api.js";

/** Cached project state plus the reconcile-after-every-mutation rule. */
export class UiSession {
  state: ProjectState | null = null;
  pending = false;

  constructor(readonly api: ApiClient, readonly projectId: string) {}

  async reconcile(): Promise<ProjectState> {
    this.state = await this.api.getProject(this.projectId);
    return this.state;
  }

  /**
   * Run a mutation, then reconcile the cached state from the server. The
   * result the mutation returned (e.g. the PUT selection duration echo) is
   * passed through so screens can display server-computed values directly.
   */
  async mutate<T>(run: (api: ApiClient, id: string) => Promise<T>): Promise<T> {
    if (this.pending) {
      throw new Error("another change is still being applied");
    }
    this.pending = true;
    try {
      const result = await run(this.api, this.projectId);
      await this.reconcile();
      return result;
    } finally {
      this.pending = false;
    }
  }
}
