/** Browser entry point; the service origin may be set via ?service=. */

import { mountApp } from './app.js';

const params = new URLSearchParams(location.search);
const baseUrl = params.get('service') ?? 'http://127.0.0.1:8400';
const root = document.getElementById('app');
if (root) mountApp(root, baseUrl);
