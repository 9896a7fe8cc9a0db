import { boot } from "./app";

document.addEventListener("DOMContentLoaded", boot);
