// Entry point: pick a board (?board= or the first one the server knows) and
// mount the app on #app.

import { ApiClient } from "./api.js";
import { createApp } from "./ui.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const api = new ApiClient();
  let boardId = new URLSearchParams(window.location.search).get("board");
  if (!boardId) {
    const listing = await api.listBoards();
    boardId = listing.boards[0]?.board_id ?? null;
  }
  if (!boardId) {
    root.textContent = "No boards yet. Create one over the API or the CLI, then reload.";
    return;
  }
  try {
    await createApp(root, api, boardId);
  } catch (err) {
    root.textContent = `Could not load board "${boardId}": ${err}`;
  }
}

document.addEventListener("DOMContentLoaded", () => {
  void boot();
});
